#pragma once

#include <initializer_list>
#include <string>

#include "hcert/config.hpp"
#include "hcert/system.hpp"

namespace support {

inline hcert::DelaySystem make_system(double alpha, std::size_t dim, std::initializer_list<const char*> A,
                                      std::initializer_list<const char*> B, const char* q, double tau,
                                      std::initializer_list<const char*> phi) {
  hcert::DelaySystem sys;
  sys.alpha = hcert::mlf::FractionalOrder(alpha);
  sys.dim = dim;
  for (const char* s : A) sys.A.push_back(hcert::expr::TimeExpr::parse(s));
  for (const char* s : B) sys.B.push_back(hcert::expr::TimeExpr::parse(s));
  sys.q = hcert::expr::TimeExpr::parse(q);
  sys.tau = tau;
  for (const char* s : phi) sys.phi.push_back(hcert::expr::TimeExpr::parse(s, "s"));
  return sys;
}

inline std::string config_path(const std::string& name) {
  return std::string(HCERT_SOURCE_DIR) + "/configs/" + name;
}

inline hcert::cli::RunConfig golden(const std::string& name) {
  return hcert::cli::load_config(config_path(name));
}

}  // namespace support
