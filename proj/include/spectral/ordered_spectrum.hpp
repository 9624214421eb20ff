#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral {

// Thrown by the SDE steppers when two particles land on top of each other
// (or when duplicate positions make a drift evaluation undefined).
class collision_error : public std::runtime_error {
public:
    explicit collision_error(const std::string& what) : std::runtime_error(what) {}
};

/// Strictly ordered-by-construction eigenvalue/particle positions at one
/// time instant.  Ties are allowed in general; SDE initial data additionally
/// requires strict increase (checked by the integrator).
class OrderedSpectrum {
public:
    explicit OrderedSpectrum(std::vector<double> positions);

    static OrderedSpectrum from_unsorted(std::vector<double> positions);

    std::size_t count() const { return positions_.size(); }
    const std::vector<double>& positions() const { return positions_; }
    double operator[](std::size_t i) const { return positions_[i]; }

    bool strictly_increasing() const;
    double min_gap() const;

    // one-column CSV, header "lambda"
    void write_csv(std::ostream& os) const;

private:
    std::vector<double> positions_;
};

/// Spectral dominance s1 <= s2 via the counting-function criterion:
/// for every x, #{i : s1_i <= x} >= #{i : s2_i <= x}.  With equal counts this
/// is exactly the indexwise comparison s1_i <= s2_i; counts may differ.
bool dominates(const OrderedSpectrum& s1, const OrderedSpectrum& s2);

} // namespace spectral
