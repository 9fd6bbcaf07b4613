#pragma once

#include <functional>
#include <string>
#include <vector>

namespace magschro {

struct Warning {
    std::string code;
    std::string message;
};

using WarningHandler = std::function<void(const Warning&)>;

// Default handler prints to stderr. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& code, const std::string& message);

// Collects warnings for the lifetime of the object (tests and reports).
class WarningCapture {
public:
    WarningCapture();
    ~WarningCapture();
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

    const std::vector<Warning>& warnings() const { return warnings_; }
    bool contains(const std::string& code) const;

private:
    std::vector<Warning> warnings_;
    WarningHandler previous_;
};

}  // namespace magschro
