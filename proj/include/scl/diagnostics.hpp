#pragma once

#include <string>
#include <vector>

namespace scl {

// Half-open byte range plus the 1-based line/column of its start. Default
// (all zero) marks programmatically built nodes with no source text.
struct SourceSpan {
    int begin = 0;
    int end = 0;
    int line = 0;
    int col = 0;
};

struct Diagnostic {
    std::string message;
    SourceSpan span;
};

// `path:line:col: error: message`, the one-per-line CLI diagnostic form.
std::string format_diagnostic(const std::string& path, const Diagnostic& d);

}  // namespace scl
