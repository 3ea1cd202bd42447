#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace fbcsf::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level from FBCSF_LOG (error, info, debug); warnings are shown unless the level is error.
inline Level level() {
    static const Level lvl = [] {
        const char* v = std::getenv("FBCSF_LOG");
        if (v == nullptr) return Level::Warn;
        if (std::strcmp(v, "error") == 0) return Level::Error;
        if (std::strcmp(v, "info") == 0) return Level::Info;
        if (std::strcmp(v, "debug") == 0) return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

inline void vwrite(Level at, const char* tag, const char* fmt, va_list args) {
    if (static_cast<int>(at) > static_cast<int>(level())) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

#if defined(__GNUC__)
#define FBCSF_PRINTF_LIKE __attribute__((format(printf, 1, 2)))
#else
#define FBCSF_PRINTF_LIKE
#endif

inline void error(const char* fmt, ...) FBCSF_PRINTF_LIKE;
inline void warn(const char* fmt, ...) FBCSF_PRINTF_LIKE;
inline void info(const char* fmt, ...) FBCSF_PRINTF_LIKE;
inline void debug(const char* fmt, ...) FBCSF_PRINTF_LIKE;

inline void error(const char* fmt, ...) { va_list a; va_start(a, fmt); vwrite(Level::Error, "error", fmt, a); va_end(a); }
inline void warn(const char* fmt, ...) { va_list a; va_start(a, fmt); vwrite(Level::Warn, "warn", fmt, a); va_end(a); }
inline void info(const char* fmt, ...) { va_list a; va_start(a, fmt); vwrite(Level::Info, "info", fmt, a); va_end(a); }
inline void debug(const char* fmt, ...) { va_list a; va_start(a, fmt); vwrite(Level::Debug, "debug", fmt, a); va_end(a); }

#undef FBCSF_PRINTF_LIKE

}  // namespace fbcsf::log
