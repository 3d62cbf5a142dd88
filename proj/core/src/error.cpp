#include "ecgemd/error.hpp"

namespace ecgemd {

void ensure(bool condition, const std::string& what) {
    if (!condition) throw InvariantError("invariant violated: " + what);
}

}  // namespace ecgemd
