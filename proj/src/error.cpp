#include "ctp/error.hpp"

namespace ctp {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::Config: return "configuration error";
    case Errc::Validation: return "validation error";
    case Errc::Regularity: return "regularity error";
    case Errc::Factorization: return "factorization failure";
    case Errc::Domain: return "domain error";
    case Errc::Degenerate: return "degenerate density";
    case Errc::InsufficientData: return "insufficient data";
    case Errc::Window: return "window error";
    case Errc::IllConditioned: return "ill-conditioned";
    case Errc::Usage: return "usage error";
    case Errc::Truncation: return "truncation error";
    case Errc::Io: return "i/o error";
  }
  return "error";
}

}  // namespace ctp
