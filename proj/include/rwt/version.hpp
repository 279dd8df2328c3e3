// SPDX-License-Identifier: Apache-2.0
#ifndef RWT_VERSION_HPP
#define RWT_VERSION_HPP

namespace rwt {
inline constexpr const char* library_version = "0.1.0";
}

#endif
