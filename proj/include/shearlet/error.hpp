#pragma once

#include <stdexcept>
#include <string>

namespace shearlet {

enum class Errc {
  invalid_scale,
  dimension,
  domain,
  invalid_grid,
  support,
  aliasing,
  grid_mismatch,
  empty_channels,
  precondition,
  memory_budget,
  io,
  config,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace shearlet
