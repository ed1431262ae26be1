#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emospread {

enum class ErrorCode {
	InvalidArgument,
	InvalidConfig,
	// gkg ingest
	MalformedLine,
	BadTimestamp,
	BadGcam,
	// emotion indicators
	EmptyDay,
	ZeroDenominator,
	WindowTooLong,
	DegenerateSeries,
	// quantile regression
	RankDeficient,
	NonConvergence,
	ZeroRestrictedLoss,
	UnboundedInterval,
	MissingRegressor,
	// rolling forecast
	CalendarMismatch,
	InsufficientRows,
	// fluctuation test
	TooShort,
	ZeroVariance,
	UnsupportedMu,
	// market data and pipeline
	BadRow,
	DuplicateDate,
	EmptyFile,
	EmptyYear,
	InvalidSpec,
	IoError,
	StageFailure,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error code. All library failures
/// are reported through this type.
class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string &message)
	    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

	ErrorCode code() const noexcept { return code_; }

private:
	ErrorCode code_;
};

} // namespace emospread
