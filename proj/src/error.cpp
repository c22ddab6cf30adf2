#include "kolmo/error.hpp"

namespace kolmo {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::domain_error: return "domain error";
    case ErrorCode::hypothesis_violation: return "hypothesis violation";
    case ErrorCode::numeric_failure: return "numeric failure";
    case ErrorCode::config_error: return "config error";
    case ErrorCode::io_error: return "i/o error";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::internal: return "internal error";
    }
    return "unknown error";
}

void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace kolmo
