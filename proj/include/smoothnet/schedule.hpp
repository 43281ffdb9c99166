#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothnet {

// Which endpoint receives the excess token when a balancer sees an odd sum.
// TowardU routes it to the smaller-indexed endpoint ("up").
enum class Orientation : std::uint8_t { TowardU, TowardV };

struct Balancer {
    std::uint32_t u = 0; // always u < v
    std::uint32_t v = 0;
    Orientation orient = Orientation::TowardU;

    bool operator==(const Balancer&) const = default;
};

// One round of the network: a set of balancers in which no vertex appears
// twice. Round numbers are positional (1-based) in the enclosing schedule.
struct Matching {
    std::vector<Balancer> balancers;

    bool operator==(const Matching&) const = default;
};

// An n-vertex balancing network: an ordered list of matchings applied round
// by round. Immutable once built; sampling perturbations never mutates it.
class Schedule {
public:
    Schedule(std::uint32_t n, std::vector<Matching> rounds);

    std::uint32_t n() const { return n_; }
    std::size_t num_rounds() const { return rounds_.size(); }

    // 1-based round access, matching the on-disk numbering.
    const Matching& round(std::size_t r) const { return rounds_[r - 1]; }
    const std::vector<Matching>& rounds() const { return rounds_; }

    std::size_t balancer_count() const;

    bool operator==(const Schedule&) const = default;

private:
    std::uint32_t n_;
    std::vector<Matching> rounds_;
};

enum class CccOrientation { AllUp, AllDown, PerBalancerList };

// Cube-connected-cycles network on 2^log_n wires, log_n layers. Layer l
// (1-based) pairs wires that differ exactly in bit (log_n - l), so layer 1
// splits on the most significant bit and the last layer pairs neighbours.
// With PerBalancerList, `orientations` supplies one entry per balancer in
// canonical order (round ascending, balancer order within the round).
Schedule build_ccc(int log_n, CccOrientation kind,
                   std::span<const Orientation> orientations = {});

// The `round` matchings repeated `periods` times.
Schedule build_periodic(std::uint32_t n, const std::vector<Matching>& round,
                        int periods);

// Detects the CCC layer structure; returns log2(n) when it matches.
std::optional<int> ccc_log_n(const Schedule& s);

// Copy with every balancer orientation toggled.
Schedule flip_all_orientations(const Schedule& s);

// Balancers with a forward path (through consecutive rounds) to `wire`,
// kept per round as indices into that round's balancer list.
struct AffectingSet {
    std::uint32_t wire = 0;
    std::vector<std::vector<std::uint32_t>> per_round;

    std::size_t total() const;
};

AffectingSet affecting_sets(const Schedule& s, std::uint32_t wire);

// Schedule file I/O. Format:
//   smoothnet-schedule v1
//   n=<int> T=<int>
//   round 1
//   <u> <v> <U|V>
//   ...
// Lines starting with '#' are comments. save/load round-trips exactly.
class ScheduleIoError : public std::runtime_error {
public:
    ScheduleIoError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

void save_schedule(const Schedule& s, std::ostream& out);
void save_schedule(const Schedule& s, const std::string& path);
Schedule load_schedule(std::istream& in);
Schedule load_schedule(const std::string& path);

} // namespace smoothnet
