#include "psychocal/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace psychocal {

DegenerateItemError::DegenerateItemError(std::vector<std::string> bad)
    : DomainError([&bad] {
          std::ostringstream os;
          os << "degenerate items (single observed score class):";
          for (const auto& id : bad) os << ' ' << id;
          return os.str();
      }()),
      items(std::move(bad)) {}

void ItemParams::validate() const {
    if (steps.size() < 2) throw DomainError("ItemParams: need at least 2 categories");
    if (!std::isfinite(discrimination) || !std::isfinite(difficulty))
        throw DomainError("ItemParams: non-finite parameter for item '" + item_id + "'");
    if (discrimination <= 0.0)
        throw DomainError("ItemParams: discrimination must be positive for item '" + item_id + "'");
    if (steps[0] != 0.0)
        throw DomainError("ItemParams: steps[0] must be 0 for item '" + item_id + "'");
    double sum = 0.0;
    for (double d : steps) {
        if (!std::isfinite(d))
            throw DomainError("ItemParams: non-finite step for item '" + item_id + "'");
        sum += d;
    }
    if (std::abs(sum) > 1e-9)
        throw DomainError("ItemParams: steps must sum to 0 for item '" + item_id + "'");
}

}  // namespace psychocal
