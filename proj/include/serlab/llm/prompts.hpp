#pragma once

#include <string>
#include <string_view>

#include "serlab/model/config.hpp"

namespace serlab::llm {

// Lines are joined with '\n' and there is no trailing newline. The
// transcript is substituted as-is.
std::string build_categorical_prompt(std::string_view transcript);
std::string build_attribute_prompt(std::string_view transcript);
std::string build_prompt(model::Task task, std::string_view transcript);

// The templates with the transcript slot left empty.
std::string_view categorical_template();
std::string_view attribute_template();

}  // namespace serlab::llm
