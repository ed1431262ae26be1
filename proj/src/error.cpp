#include "emospread/error.hpp"

namespace emospread {

std::string_view to_string(ErrorCode code) {
	switch (code) {
	case ErrorCode::InvalidArgument: return "InvalidArgument";
	case ErrorCode::InvalidConfig: return "InvalidConfig";
	case ErrorCode::MalformedLine: return "MalformedLine";
	case ErrorCode::BadTimestamp: return "BadTimestamp";
	case ErrorCode::BadGcam: return "BadGcam";
	case ErrorCode::EmptyDay: return "EmptyDay";
	case ErrorCode::ZeroDenominator: return "ZeroDenominator";
	case ErrorCode::WindowTooLong: return "WindowTooLong";
	case ErrorCode::DegenerateSeries: return "DegenerateSeries";
	case ErrorCode::RankDeficient: return "RankDeficient";
	case ErrorCode::NonConvergence: return "NonConvergence";
	case ErrorCode::ZeroRestrictedLoss: return "ZeroRestrictedLoss";
	case ErrorCode::UnboundedInterval: return "UnboundedInterval";
	case ErrorCode::MissingRegressor: return "MissingRegressor";
	case ErrorCode::CalendarMismatch: return "CalendarMismatch";
	case ErrorCode::InsufficientRows: return "InsufficientRows";
	case ErrorCode::TooShort: return "TooShort";
	case ErrorCode::ZeroVariance: return "ZeroVariance";
	case ErrorCode::UnsupportedMu: return "UnsupportedMu";
	case ErrorCode::BadRow: return "BadRow";
	case ErrorCode::DuplicateDate: return "DuplicateDate";
	case ErrorCode::EmptyFile: return "EmptyFile";
	case ErrorCode::EmptyYear: return "EmptyYear";
	case ErrorCode::InvalidSpec: return "InvalidSpec";
	case ErrorCode::IoError: return "IoError";
	case ErrorCode::StageFailure: return "StageFailure";
	}
	return "Unknown";
}

} // namespace emospread
