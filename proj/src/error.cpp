#include "fieldmap/error.hpp"

namespace fieldmap {

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::input: return 2;
        case ErrorKind::query: return 3;
        case ErrorKind::resource: return 4;
        case ErrorKind::degenerate_window: return 5;
    }
    return 1;
}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : Error(ErrorKind::input, source + ", line " + std::to_string(line) + ": " + message), line_(line) {}

UndefinedTermError::UndefinedTermError(std::size_t term, const std::string& label,
                                       const std::string& context)
    : Error(ErrorKind::query,
            "term '" + label + "' (id " + std::to_string(term) + ") has no occurrences in " + context),
      term_(term) {}

}  // namespace fieldmap
