#include "fatpipe/errors.hpp"

namespace fatpipe {

namespace {

std::string join_issues(const std::vector<std::string>& issues)
{
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) out += "; ";
        out += issue;
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

}  // namespace fatpipe
