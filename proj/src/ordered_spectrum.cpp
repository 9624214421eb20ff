#include "spectral/ordered_spectrum.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace spectral {

OrderedSpectrum::OrderedSpectrum(std::vector<double> positions)
    : positions_(std::move(positions))
{
    if (positions_.empty())
        throw std::invalid_argument("OrderedSpectrum: empty positions");
    for (std::size_t i = 1; i < positions_.size(); ++i)
        if (positions_[i] < positions_[i - 1])
            throw std::invalid_argument("OrderedSpectrum: positions not sorted");
}

OrderedSpectrum OrderedSpectrum::from_unsorted(std::vector<double> positions)
{
    std::sort(positions.begin(), positions.end());
    return OrderedSpectrum(std::move(positions));
}

bool OrderedSpectrum::strictly_increasing() const
{
    for (std::size_t i = 1; i < positions_.size(); ++i)
        if (positions_[i] <= positions_[i - 1]) return false;
    return true;
}

double OrderedSpectrum::min_gap() const
{
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < positions_.size(); ++i)
        g = std::min(g, positions_[i] - positions_[i - 1]);
    return g;
}

void OrderedSpectrum::write_csv(std::ostream& os) const
{
    os << "lambda\n";
    char buf[40];
    for (double v : positions_) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << '\n';
    }
}

bool dominates(const OrderedSpectrum& s1, const OrderedSpectrum& s2)
{
    const auto& a = s1.positions();
    const auto& b = s2.positions();
    if (a.size() == b.size()) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] > b[i]) return false;
        return true;
    }
    // counting-function criterion: #{a <= x} >= #{b <= x} for all x; it is
    // enough to test at the atoms of b, where the right side jumps.
    for (std::size_t j = 0; j < b.size(); ++j) {
        auto count_a = static_cast<std::size_t>(
            std::upper_bound(a.begin(), a.end(), b[j]) - a.begin());
        auto count_b = static_cast<std::size_t>(
            std::upper_bound(b.begin(), b.end(), b[j]) - b.begin());
        if (count_a < count_b) return false;
    }
    return true;
}

} // namespace spectral
