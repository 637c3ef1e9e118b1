#pragma once

#include <functional>

#include "mfdfa/error.hpp"

// Code of the mfdfa::Error thrown by fn, or Ok when nothing is thrown.
inline mfdfa::ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const mfdfa::Error& e) {
        return e.code();
    }
    return mfdfa::ErrorCode::Ok;
}
