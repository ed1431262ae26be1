#include "emospread/market.hpp"

#include "emospread/error.hpp"
#include "emospread/quantreg.hpp"
#include "emospread/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace emospread::market {

void MarketSeries::validate() const {
	const auto n = dates.size();
	if (spread.size() != n || crd.size() != n || liq.size() != n || vstoxx.size() != n)
		throw Error(ErrorCode::InvalidArgument, "market columns differ in length");
	for (std::size_t i = 1; i < n; ++i) {
		if (dates[i] == dates[i - 1])
			throw Error(ErrorCode::DuplicateDate, format_date(dates[i]));
		if (dates[i] < dates[i - 1])
			throw Error(ErrorCode::InvalidArgument, "market dates not increasing");
	}
}

MarketSeries parse_market_csv(std::string_view text, const MarketCsvSchema &schema, std::string country) {
	std::istringstream in{std::string(text)};
	std::string line;
	std::size_t line_no = 0;
	std::vector<std::string> header;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty())
			continue;
		for (auto f : split(trim(line), ','))
			header.emplace_back(trim(f));
		break;
	}
	if (header.empty())
		throw Error(ErrorCode::EmptyFile, "market CSV has no header");

	auto index_of = [&](const std::string &name) {
		auto it = std::find(header.begin(), header.end(), name);
		if (it == header.end())
			throw Error(ErrorCode::BadRow, "header lacks column '" + name + "'");
		return static_cast<std::size_t>(it - header.begin());
	};
	const std::size_t c_date = index_of(schema.date);
	const std::size_t c_cols[4] = {index_of(schema.spread), index_of(schema.crd), index_of(schema.liq),
	                               index_of(schema.vstoxx)};

	struct Row {
		Date date;
		double v[4];
	};
	std::vector<Row> rows;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty())
			continue;
		auto fields = split(trim(line), ',');
		if (fields.size() != header.size())
			throw Error(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": expected " +
			                                   std::to_string(header.size()) + " fields");
		Row row{};
		auto d = parse_iso_date(trim(fields[c_date]));
		if (!d)
			throw Error(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": bad date");
		row.date = *d;
		for (int k = 0; k < 4; ++k) {
			auto v = parse_double(fields[c_cols[k]]);
			if (!v || !std::isfinite(*v))
				throw Error(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": bad number");
			row.v[k] = *v;
		}
		rows.push_back(row);
	}
	if (rows.empty())
		throw Error(ErrorCode::EmptyFile, "market CSV has no data rows");

	std::stable_sort(rows.begin(), rows.end(), [](const Row &a, const Row &b) { return a.date < b.date; });
	MarketSeries out;
	out.country = std::move(country);
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (i && rows[i].date == rows[i - 1].date)
			throw Error(ErrorCode::DuplicateDate, format_date(rows[i].date));
		out.dates.push_back(rows[i].date);
		out.spread.push_back(rows[i].v[0]);
		out.crd.push_back(rows[i].v[1]);
		out.liq.push_back(rows[i].v[2]);
		out.vstoxx.push_back(rows[i].v[3]);
	}
	return out;
}

MarketSeries load_market_csv(const std::string &path, const MarketCsvSchema &schema, std::string country) {
	return parse_market_csv(read_file(path), schema, std::move(country));
}

std::string format_market_csv(const MarketSeries &s) {
	std::ostringstream out;
	out << "date,spread,crd,liq,vstoxx\n";
	for (std::size_t i = 0; i < s.size(); ++i)
		out << format_date(s.dates[i]) << ',' << format_double(s.spread[i]) << ',' << format_double(s.crd[i]) << ','
		    << format_double(s.liq[i]) << ',' << format_double(s.vstoxx[i]) << '\n';
	return out.str();
}

std::vector<double> first_difference(const std::vector<double> &levels) {
	std::vector<double> out;
	for (std::size_t i = 1; i < levels.size(); ++i)
		out.push_back(levels[i] - levels[i - 1]);
	return out;
}

namespace {

DescriptiveRow summarise(int year, std::string variable, const std::vector<double> &v) {
	DescriptiveRow row;
	row.year = year;
	row.variable = std::move(variable);
	row.n = v.size();
	row.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
	double ss = 0.0;
	for (double x : v)
		ss += (x - row.mean) * (x - row.mean);
	row.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
	row.p05 = quantreg::lower_empirical_quantile(v, 0.05);
	row.p95 = quantreg::lower_empirical_quantile(v, 0.95);
	return row;
}

} // namespace

std::vector<DescriptiveRow> descriptive_stats(const MarketSeries &s, bool by_year) {
	s.validate();
	if (s.size() == 0)
		throw Error(ErrorCode::EmptyYear, "empty market series");
	const char *names[] = {"spread", "d_spread", "crd", "d_liq", "d_vstoxx"};
	// year -> variable -> values
	std::map<int, std::map<int, std::vector<double>>> groups;
	for (std::size_t i = 0; i < s.size(); ++i) {
		const int y = by_year ? year_of(s.dates[i]) : 0;
		auto &g = groups[y];
		g[0].push_back(s.spread[i]);
		g[2].push_back(s.crd[i]);
		if (i > 0) {
			g[1].push_back(s.spread[i] - s.spread[i - 1]);
			g[3].push_back(s.liq[i] - s.liq[i - 1]);
			g[4].push_back(s.vstoxx[i] - s.vstoxx[i - 1]);
		}
	}
	std::vector<DescriptiveRow> rows;
	for (auto &[year, vars] : groups)
		for (int k = 0; k < 5; ++k) {
			auto it = vars.find(k);
			if (it == vars.end() || it->second.empty())
				throw Error(ErrorCode::EmptyYear, std::string(names[k]) + " has no observations in " +
				                                      (by_year ? std::to_string(year) : std::string("sample")));
			rows.push_back(summarise(year, names[k], it->second));
		}
	return rows;
}

std::string format_descriptive_csv(const std::vector<DescriptiveRow> &rows) {
	std::ostringstream out;
	out << "year,variable,n,mean,sd,p05,p95\n";
	for (const auto &r : rows)
		out << r.year << ',' << r.variable << ',' << r.n << ',' << format_double(r.mean) << ',' << format_double(r.sd)
		    << ',' << format_double(r.p05) << ',' << format_double(r.p95) << '\n';
	return out.str();
}

} // namespace emospread::market
