#include "shearlet/error.hpp"

namespace shearlet {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_scale: return "invalid scale";
    case Errc::dimension: return "dimension error";
    case Errc::domain: return "domain error";
    case Errc::invalid_grid: return "invalid grid";
    case Errc::support: return "support error";
    case Errc::aliasing: return "aliasing error";
    case Errc::grid_mismatch: return "grid mismatch";
    case Errc::empty_channels: return "empty channel set";
    case Errc::precondition: return "precondition violated";
    case Errc::memory_budget: return "memory budget exceeded";
    case Errc::io: return "i/o error";
    case Errc::config: return "config error";
  }
  return "error";
}

}  // namespace shearlet
