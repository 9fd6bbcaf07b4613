#include "magschro/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace magschro {

namespace {
std::mutex g_mutex;
WarningHandler& handler_slot() {
    static WarningHandler h = [](const Warning& w) {
        std::cerr << "warning [" << w.code << "]: " << w.message << '\n';
    };
    return h;
}
}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_mutex);
    WarningHandler old = std::move(handler_slot());
    handler_slot() = std::move(handler);
    return old;
}

void warn(const std::string& code, const std::string& message) {
    std::lock_guard lock(g_mutex);
    if (handler_slot()) handler_slot()(Warning{code, message});
}

WarningCapture::WarningCapture() {
    previous_ = set_warning_handler([this](const Warning& w) { warnings_.push_back(w); });
}

WarningCapture::~WarningCapture() { set_warning_handler(std::move(previous_)); }

bool WarningCapture::contains(const std::string& code) const {
    for (const auto& w : warnings_)
        if (w.code == code) return true;
    return false;
}

}  // namespace magschro
