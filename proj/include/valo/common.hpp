#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

namespace valo {

// Error taxonomy used across the pipeline. Every CLI command catches Error
// and turns it into a one-line diagnostic + nonzero exit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data (missing frames, dim mismatches, ...).
struct IngestError : Error {
    using Error::Error;
};

// Malformed file contents (.flo headers, feature files, model files, ...).
struct FormatError : Error {
    using Error::Error;
};

// Invalid configuration (odd region size, t <= 0, unknown keys, ...).
struct ConfigError : Error {
    using Error::Error;
};

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Process-wide log level, initialized from the VALO_LOG env var.
LogLevel log_level();
void set_log_level(LogLevel lvl);

void log_msg(LogLevel lvl, const std::string& msg);

inline void log_info(const std::string& msg) { log_msg(LogLevel::Info, msg); }
inline void log_warn(const std::string& msg) { log_msg(LogLevel::Warn, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::Debug, msg); }

// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
// concurrency). Exceptions from workers are rethrown on the caller thread.
// Callers are responsible for making iterations independent.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace valo
