#include "igflow/error.hpp"

#include <sstream>

namespace igflow {

std::string describe(const Vector& v) {
    std::ostringstream os;
    os.precision(10);
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << ')';
    return os.str();
}

}  // namespace igflow
