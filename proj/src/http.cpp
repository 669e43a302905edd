#include "aspect/http.hpp"

#include "aspect/error.hpp"

namespace aspect::http {

Endpoint parse_endpoint(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorKind::InvalidArgument, "endpoint URL needs a scheme: " + std::string(url));
  }
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::InvalidArgument, "unsupported URL scheme: " + std::string(scheme));
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

}  // namespace aspect::http
