#pragma once

#include <string>
#include <string_view>

namespace aspect::http {

/// "http://host:8080/v1/embed" -> {"http://host:8080", "/v1/embed"}.
struct Endpoint {
  std::string origin;
  std::string path;
};

/// Throws InvalidArgument when the URL has no http:// or https:// scheme.
Endpoint parse_endpoint(std::string_view url);

}  // namespace aspect::http
