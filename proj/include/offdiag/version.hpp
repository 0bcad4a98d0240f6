#ifndef OFFDIAG_VERSION_HPP
#define OFFDIAG_VERSION_HPP

namespace offdiag {

inline constexpr const char* tool_name    = "offdiag";
inline constexpr const char* tool_version = "0.1.0";

} // namespace offdiag

#endif
