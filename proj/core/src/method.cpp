#include "severfit/method.hpp"

#include <algorithm>
#include <cctype>

namespace severfit {

namespace {
std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::MLE: return "MLE";
    case Method::MTuM: return "MTuM";
    case Method::MCM: return "MCM";
    case Method::MTCM: return "MTCM";
  }
  return "?";
}

std::string_view to_string(Model m) {
  switch (m) {
    case Model::Exp: return "EXP";
    case Model::Pareto1: return "PARETO1";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  const auto l = lower(s);
  if (l == "mle") return Method::MLE;
  if (l == "mtum") return Method::MTuM;
  if (l == "mcm") return Method::MCM;
  if (l == "mtcm") return Method::MTCM;
  return std::nullopt;
}

std::optional<Model> parse_model(std::string_view s) {
  const auto l = lower(s);
  if (l == "exp") return Model::Exp;
  if (l == "pareto1" || l == "pareto") return Model::Pareto1;
  return std::nullopt;
}

}  // namespace severfit
