#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace kq {

// data files shipped inside the binary, keyed by their path below data/
const std::map<std::string, std::string_view>& resources();
std::optional<std::string_view> resource(const std::string& name);

} // namespace kq
