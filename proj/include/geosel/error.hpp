#ifndef GEOSEL_ERROR_HPP
#define GEOSEL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace geosel {

// Error classes map 1:1 to CLI exit codes and to the token printed on stderr.
enum class ErrorClass {
    Usage = 2,        // bad flags / unsupported combination
    InputFormat = 3,  // malformed file content
    Consistency = 4,  // inputs valid in isolation but mutually inconsistent
    EmptyResult = 5,  // operation produced nothing (empty input, zero cells)
};

inline const char* error_token(ErrorClass c) {
    switch (c) {
        case ErrorClass::Usage: return "usage";
        case ErrorClass::InputFormat: return "input-format";
        case ErrorClass::Consistency: return "consistency";
        case ErrorClass::EmptyResult: return "empty-result";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorClass cls, const std::string& msg)
        : std::runtime_error(msg), cls_(cls) {}

    ErrorClass cls() const { return cls_; }
    int exit_code() const { return static_cast<int>(cls_); }
    const char* token() const { return error_token(cls_); }

  private:
    ErrorClass cls_;
};

}  // namespace geosel

#endif
