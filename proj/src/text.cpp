#include "emospread/text.hpp"

#include "emospread/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace emospread {

std::vector<std::string_view> split(std::string_view text, char sep) {
	std::vector<std::string_view> out;
	std::size_t start = 0;
	while (true) {
		auto pos = text.find(sep, start);
		if (pos == std::string_view::npos) {
			out.push_back(text.substr(start));
			break;
		}
		out.push_back(text.substr(start, pos - start));
		start = pos + 1;
	}
	return out;
}

std::string_view trim(std::string_view text) {
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
		text.remove_prefix(1);
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
		text.remove_suffix(1);
	return text;
}

std::string to_lower(std::string_view text) {
	std::string out(text);
	std::transform(out.begin(), out.end(), out.begin(),
	               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return out;
}

std::optional<double> parse_double(std::string_view text) {
	text = trim(text);
	if (text.empty())
		return std::nullopt;
	if (text.front() == '+')
		text.remove_prefix(1);
	double value = 0.0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc() || ptr != text.data() + text.size())
		return std::nullopt;
	return value;
}

std::optional<std::uint64_t> parse_uint(std::string_view text) {
	if (text.empty())
		return std::nullopt;
	std::uint64_t value = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc() || ptr != text.data() + text.size())
		return std::nullopt;
	return value;
}

std::string format_double(double value) {
	if (std::isnan(value))
		return "nan";
	if (value == 0.0)
		return "0";
	char buf[64];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
	return std::string(buf, ptr);
}

std::string sha256_hex(std::string_view bytes) {
	std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
	unsigned char digest[EVP_MAX_MD_SIZE];
	unsigned int len = 0;
	if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
	    EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
	    EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
		throw Error(ErrorCode::IoError, "sha256 computation failed");
	static constexpr char hex[] = "0123456789abcdef";
	std::string out;
	out.reserve(2 * len);
	for (unsigned int i = 0; i < len; ++i) {
		out.push_back(hex[digest[i] >> 4]);
		out.push_back(hex[digest[i] & 0xF]);
	}
	return out;
}

std::string sha256_file(const std::string &path) { return sha256_hex(read_file(path)); }

std::string read_file(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error(ErrorCode::IoError, "cannot open " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const std::string &path, std::string_view contents) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw Error(ErrorCode::IoError, "cannot write " + path);
	out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
	if (!out)
		throw Error(ErrorCode::IoError, "short write to " + path);
}

} // namespace emospread
