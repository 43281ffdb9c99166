#include "smoothnet/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace smoothnet {

namespace {

void validate_matching(std::uint32_t n, const Matching& m, std::size_t round_1based) {
    std::vector<char> seen(n, 0);
    for (const Balancer& b : m.balancers) {
        if (b.u >= b.v)
            throw std::invalid_argument("round " + std::to_string(round_1based) +
                                        ": balancer endpoints must satisfy u < v");
        if (b.v >= n)
            throw std::invalid_argument("round " + std::to_string(round_1based) +
                                        ": vertex index out of range");
        if (seen[b.u] || seen[b.v])
            throw std::invalid_argument("round " + std::to_string(round_1based) +
                                        ": duplicate vertex in matching");
        seen[b.u] = seen[b.v] = 1;
    }
}

} // namespace

Schedule::Schedule(std::uint32_t n, std::vector<Matching> rounds)
    : n_(n), rounds_(std::move(rounds)) {
    if (n_ == 0) throw std::invalid_argument("schedule needs at least one vertex");
    for (std::size_t r = 0; r < rounds_.size(); ++r)
        validate_matching(n_, rounds_[r], r + 1);
}

std::size_t Schedule::balancer_count() const {
    std::size_t total = 0;
    for (const Matching& m : rounds_) total += m.balancers.size();
    return total;
}

Schedule build_ccc(int log_n, CccOrientation kind,
                   std::span<const Orientation> orientations) {
    if (log_n < 1 || log_n > 30)
        throw std::invalid_argument("build_ccc: log_n must be in [1,30]");
    const std::uint32_t n = 1u << log_n;
    std::vector<Matching> rounds(static_cast<std::size_t>(log_n));
    std::size_t flat = 0;
    for (int layer = 1; layer <= log_n; ++layer) {
        const std::uint32_t bit = 1u << (log_n - layer);
        Matching& m = rounds[static_cast<std::size_t>(layer - 1)];
        m.balancers.reserve(n / 2);
        for (std::uint32_t u = 0; u < n; ++u) {
            if (u & bit) continue;
            Orientation o = Orientation::TowardU;
            switch (kind) {
            case CccOrientation::AllUp: o = Orientation::TowardU; break;
            case CccOrientation::AllDown: o = Orientation::TowardV; break;
            case CccOrientation::PerBalancerList:
                if (flat >= orientations.size())
                    throw std::invalid_argument("build_ccc: orientation list too short");
                o = orientations[flat];
                break;
            }
            m.balancers.push_back(Balancer{u, u | bit, o});
            ++flat;
        }
    }
    if (kind == CccOrientation::PerBalancerList && flat != orientations.size())
        throw std::invalid_argument("build_ccc: orientation list too long");
    return Schedule(n, std::move(rounds));
}

Schedule build_periodic(std::uint32_t n, const std::vector<Matching>& round,
                        int periods) {
    if (round.empty())
        throw std::invalid_argument("build_periodic: round needs at least one matching");
    if (periods < 1)
        throw std::invalid_argument("build_periodic: periods must be positive");
    std::vector<Matching> rounds;
    rounds.reserve(round.size() * static_cast<std::size_t>(periods));
    for (int p = 0; p < periods; ++p)
        for (const Matching& m : round) rounds.push_back(m);
    return Schedule(n, std::move(rounds));
}

std::optional<int> ccc_log_n(const Schedule& s) {
    const std::uint32_t n = s.n();
    if (n < 2 || (n & (n - 1)) != 0) return std::nullopt;
    int log_n = 0;
    while ((1u << log_n) < n) ++log_n;
    if (s.num_rounds() != static_cast<std::size_t>(log_n)) return std::nullopt;
    for (int layer = 1; layer <= log_n; ++layer) {
        const Matching& m = s.round(static_cast<std::size_t>(layer));
        if (m.balancers.size() != n / 2) return std::nullopt;
        const std::uint32_t bit = 1u << (log_n - layer);
        std::size_t i = 0;
        for (std::uint32_t u = 0; u < n; ++u) {
            if (u & bit) continue;
            const Balancer& b = m.balancers[i++];
            if (b.u != u || b.v != (u | bit)) return std::nullopt;
        }
    }
    return log_n;
}

Schedule flip_all_orientations(const Schedule& s) {
    std::vector<Matching> rounds = s.rounds();
    for (Matching& m : rounds)
        for (Balancer& b : m.balancers)
            b.orient = b.orient == Orientation::TowardU ? Orientation::TowardV
                                                        : Orientation::TowardU;
    return Schedule(s.n(), std::move(rounds));
}

std::size_t AffectingSet::total() const {
    std::size_t t = 0;
    for (const auto& r : per_round) t += r.size();
    return t;
}

AffectingSet affecting_sets(const Schedule& s, std::uint32_t wire) {
    if (wire >= s.n())
        throw std::invalid_argument("affecting_sets: wire out of range");
    AffectingSet out;
    out.wire = wire;
    out.per_round.resize(s.num_rounds());
    // Backward reachability: a balancer affects the wire when one of its
    // endpoints is the wire itself or feeds a selected later-round balancer.
    std::vector<char> reach(s.n(), 0);
    reach[wire] = 1;
    for (std::size_t r = s.num_rounds(); r >= 1; --r) {
        const Matching& m = s.round(r);
        auto& sel = out.per_round[r - 1];
        for (std::uint32_t i = 0; i < m.balancers.size(); ++i) {
            const Balancer& b = m.balancers[i];
            if (reach[b.u] || reach[b.v]) sel.push_back(i);
        }
        for (std::uint32_t i : sel) {
            reach[m.balancers[i].u] = 1;
            reach[m.balancers[i].v] = 1;
        }
    }
    return out;
}

ScheduleIoError::ScheduleIoError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

void save_schedule(const Schedule& s, std::ostream& out) {
    out << "smoothnet-schedule v1\n";
    out << "n=" << s.n() << " T=" << s.num_rounds() << "\n";
    for (std::size_t r = 1; r <= s.num_rounds(); ++r) {
        out << "round " << r << "\n";
        for (const Balancer& b : s.round(r).balancers)
            out << b.u << ' ' << b.v << ' '
                << (b.orient == Orientation::TowardU ? 'U' : 'V') << "\n";
    }
}

void save_schedule(const Schedule& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_schedule(s, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

bool parse_u32(const std::string& tok, std::uint32_t& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

} // namespace

Schedule load_schedule(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_line = [&](bool required) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        if (required) throw ScheduleIoError(lineno + 1, "unexpected end of file");
        return false;
    };

    next_line(true);
    if (line != "smoothnet-schedule v1")
        throw ScheduleIoError(lineno, "bad magic, expected 'smoothnet-schedule v1'");

    next_line(true);
    std::uint32_t n = 0, t = 0;
    {
        std::istringstream hdr(line);
        std::string ntok, ttok;
        hdr >> ntok >> ttok;
        if (ntok.rfind("n=", 0) != 0 || ttok.rfind("T=", 0) != 0 ||
            !parse_u32(ntok.substr(2), n) || !parse_u32(ttok.substr(2), t))
            throw ScheduleIoError(lineno, "bad header, expected 'n=<int> T=<int>'");
    }
    if (n == 0) throw ScheduleIoError(lineno, "n must be positive");

    std::vector<Matching> rounds;
    rounds.reserve(t);
    for (std::uint32_t r = 1; r <= t; ++r) {
        next_line(true);
        std::istringstream rh(line);
        std::string word;
        std::uint32_t idx = 0;
        rh >> word >> idx;
        if (word != "round" || idx != r)
            throw ScheduleIoError(lineno, "expected 'round " + std::to_string(r) + "'");
        Matching m;
        std::vector<char> seen(n, 0);
        // balancer lines until the next 'round' header or EOF
        while (true) {
            std::streampos pos = in.tellg();
            int saved_lineno = lineno;
            if (!next_line(false)) break;
            if (line.rfind("round ", 0) == 0) {
                in.seekg(pos);
                lineno = saved_lineno;
                break;
            }
            std::istringstream bl(line);
            std::string ut, vt, ot;
            bl >> ut >> vt >> ot;
            std::uint32_t u = 0, v = 0;
            if (!parse_u32(ut, u) || !parse_u32(vt, v) || (ot != "U" && ot != "V"))
                throw ScheduleIoError(lineno, "bad balancer line, expected '<u> <v> <U|V>'");
            std::string rest;
            if (bl >> rest) throw ScheduleIoError(lineno, "trailing tokens on balancer line");
            if (u >= v) throw ScheduleIoError(lineno, "balancer endpoints must satisfy u < v");
            if (v >= n) throw ScheduleIoError(lineno, "vertex index out of range");
            if (seen[u] || seen[v]) throw ScheduleIoError(lineno, "duplicate vertex in matching");
            seen[u] = seen[v] = 1;
            m.balancers.push_back(
                Balancer{u, v, ot == "U" ? Orientation::TowardU : Orientation::TowardV});
        }
        rounds.push_back(std::move(m));
    }
    if (rounds.size() != t)
        throw ScheduleIoError(lineno, "expected " + std::to_string(t) + " rounds");
    return Schedule(n, std::move(rounds));
}

Schedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return load_schedule(in);
}

} // namespace smoothnet
