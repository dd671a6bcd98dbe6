#ifndef SEMVOX_VERSION_HPP
#define SEMVOX_VERSION_HPP

namespace semvox {

inline constexpr const char* kVersion = "semvox 0.1.0";

} // namespace semvox

#endif
