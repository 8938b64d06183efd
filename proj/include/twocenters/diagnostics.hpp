#pragma once

#include <atomic>
#include <cstdint>
#include <string>

namespace twocenters {

/// Non-fatal consistency warning raised by an internal cross-check.
struct Diagnostic {
    const char* source;
    std::string message;
};

using DiagnosticHandler = void (*)(const Diagnostic&);

namespace detail {
inline std::atomic<DiagnosticHandler> diagnostic_handler{nullptr};
inline std::atomic<std::uint64_t> diagnostic_count{0};
} // namespace detail

/// Installs a process-wide handler; pass nullptr to only count. Returns the previous one.
inline DiagnosticHandler set_diagnostic_handler(DiagnosticHandler h) noexcept
{
    return detail::diagnostic_handler.exchange(h);
}

inline std::uint64_t diagnostic_count() noexcept { return detail::diagnostic_count.load(); }

inline void report_diagnostic(const char* source, std::string message)
{
    detail::diagnostic_count.fetch_add(1, std::memory_order_relaxed);
    if (auto h = detail::diagnostic_handler.load()) {
        h(Diagnostic{source, std::move(message)});
    }
}

} // namespace twocenters
