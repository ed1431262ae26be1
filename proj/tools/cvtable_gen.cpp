// Regenerates the bundled fluctuation-test critical values.
//
//   cvtable_gen --seed 20210301 --paths 100000 --out data/fluctuation_cv_table.csv

#include "emospread/error.hpp"
#include "emospread/fluctuation.hpp"
#include "emospread/parallel.hpp"
#include "emospread/quantreg.hpp"
#include "emospread/text.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace emospread;
namespace fl = emospread::fluctuation;

int main(int argc, char **argv) {
	CLI::App app{"Monte Carlo critical values for the two-sided fluctuation test"};
	std::uint64_t seed = 20210301;
	std::size_t paths = 100000;
	std::vector<double> mus{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
	std::vector<double> alphas{0.01, 0.05, 0.10};
	std::vector<std::size_t> lengths{100, 250, 500, 1000};
	unsigned threads = default_thread_count();
	std::string out_path;
	app.add_option("--seed", seed, "Generator seed");
	app.add_option("--paths", paths, "Simulated paths per sample length")->check(CLI::PositiveNumber);
	app.add_option("--mu", mus, "Window fractions");
	app.add_option("--alpha", alphas, "Nominal sizes");
	app.add_option("--n", lengths, "Finite sample lengths (the asymptotic length is always added)");
	app.add_option("--threads", threads, "Worker threads");
	app.add_option("--out", out_path, "Output CSV (default: stdout)");
	CLI11_PARSE(app, argc, argv);

	try {
		fl::CriticalValueTable table;
		table.header_comments = {
		    "Two-sided sup|F| critical values for the fluctuation test.",
		    "generator: cvtable_gen --seed " + std::to_string(seed) + " --paths " + std::to_string(paths),
		    "n=" + std::to_string(fl::kAsymptoticLength) +
		        " rows: known unit variance (asymptotic); other rows estimate sigma with the Bartlett HAC at "
		        "the auto bandwidth, as the test does.",
		    "cv is the lower empirical (1 - alpha) quantile of the simulated sup statistics."};

		std::vector<std::size_t> all = lengths;
		all.push_back(fl::kAsymptoticLength);
		for (std::size_t n : all) {
			const bool asymptotic = n == fl::kAsymptoticLength;
			std::cerr << "simulating n=" << n << (asymptotic ? " (asymptotic)" : "") << '\n';
			const auto sups = fl::simulate_sup_statistics(mus, n, paths, seed, asymptotic, threads);
			for (std::size_t k = 0; k < mus.size(); ++k)
				for (double alpha : alphas)
					table.rows.push_back(
					    {mus[k], alpha, n, quantreg::lower_empirical_quantile(sups[k], 1.0 - alpha)});
		}
		const auto text = table.format();
		if (out_path.empty())
			std::cout << text;
		else
			write_file(out_path, text);
	} catch (const Error &e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
