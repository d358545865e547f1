#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace severfit {

enum class Method { MLE, MTuM, MCM, MTCM };
enum class Model { Exp, Pareto1 };

std::string_view to_string(Method m);
std::string_view to_string(Model m);

// Case-insensitive parse of "mle", "mtum", "mcm", "mtcm" / "exp", "pareto1".
std::optional<Method> parse_method(std::string_view s);
std::optional<Model> parse_model(std::string_view s);

}  // namespace severfit
