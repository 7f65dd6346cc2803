#include "dcmin/artifacts.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "dcmin/config.hpp"
#include "dcmin/data_io.hpp"
#include "dcmin/errors.hpp"

namespace dcmin {

namespace {

constexpr std::string_view kQMagic = "dcmin-q-table";
constexpr std::string_view kPolicyMagic = "dcmin-policy";
constexpr std::string_view kQColumns = "tau,delta_key,soc_idx,peak_idx,action_idx,value,visits";
constexpr std::string_view kPolicyColumns = "tau,delta_key,soc_idx,peak_idx,action_idx";

std::string axis_signature(const Axis& a) {
    return format_number(a.min) + ':' + format_number(a.step) + ':' + std::to_string(a.count);
}

void write_header(std::ostream& out, std::string_view magic, const ArtifactMeta& meta) {
    out << "# " << magic << " v" << kArtifactVersion;
    for (const auto& [k, v] : meta) out << ' ' << k << '=' << v;
    out << '\n';
}

ArtifactMeta read_header(std::istream& in, std::string_view magic, std::string_view columns) {
    std::string line;
    if (!std::getline(in, line)) throw ArtifactMismatch("empty artifact, expected " + std::string(magic));
    const auto words = split_fields(line, ' ');
    if (words.size() < 3 || words[0] != "#" || words[1] != magic) {
        throw ArtifactMismatch("not a " + std::string(magic) + " artifact");
    }
    if (words[2] != "v" + std::to_string(kArtifactVersion)) {
        throw ArtifactMismatch(std::string(magic) + " version " + std::string(words[2]) +
                               " is not supported");
    }
    ArtifactMeta meta;
    for (std::size_t i = 3; i < words.size(); ++i) {
        if (words[i].empty()) continue;
        const auto eq = words[i].find('=');
        if (eq == std::string_view::npos) {
            throw ArtifactMismatch("malformed meta field '" + std::string(words[i]) + "'");
        }
        meta[std::string(words[i].substr(0, eq))] = std::string(words[i].substr(eq + 1));
    }
    if (!std::getline(in, line) || line != columns) {
        throw ParseError("expected column header '" + std::string(columns) + "'", 2);
    }
    return meta;
}

int int_field(std::string_view text, std::size_t line) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError("bad integer '" + std::string(text) + "'", line);
    }
    return v;
}

int meta_int(const ArtifactMeta& meta, const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ArtifactMismatch("artifact lacks meta field " + key);
    try {
        return int_field(it->second, 1);
    } catch (const ParseError&) {
        throw ArtifactMismatch("meta field " + key + " is not an integer");
    }
}

StateVariant meta_variant(const ArtifactMeta& meta) {
    const auto it = meta.find("variant");
    if (it == meta.end()) throw ArtifactMismatch("artifact lacks meta field variant");
    try {
        return parse_variant(it->second);
    } catch (const ConfigError& e) {
        throw ArtifactMismatch(e.what());
    }
}

void check_range(int v, int n, std::string_view what, std::size_t line) {
    if (v < 0 || v >= n) throw ParseError(std::string(what) + " index out of range", line);
}

template <typename T, typename Read>
T read_file(const std::filesystem::path& path, ArtifactMeta* meta, Read read) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read(in, meta);
}

template <typename Write>
void write_file(const std::filesystem::path& path, Write write) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write(out);
    if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace

std::string grid_signature(const StateGrid& g) {
    return "H" + std::to_string(g.horizon) + "/dt" + format_number(g.dt_seconds) + "/soc" +
           axis_signature(g.soc) + "/delta" + axis_signature(g.delta) + "/peak" +
           axis_signature(g.peak) + "/action" + axis_signature(g.action);
}

void write_q_table(std::ostream& out, const SparseQ& q, const ArtifactMeta& meta) {
    ArtifactMeta m = meta;
    m["variant"] = to_string(q.variant());
    m["n_soc"] = std::to_string(q.n_soc());
    m["n_peak"] = std::to_string(q.n_peak());
    m["n_action"] = std::to_string(q.n_action());
    write_header(out, kQMagic, m);
    out << kQColumns << '\n';
    for (const auto& [key, block] : q.blocks()) {
        for (int s = 0; s < q.n_soc(); ++s) {
            for (int p = 0; p < q.n_peak(); ++p) {
                for (int a = 0; a < q.n_action(); ++a) {
                    const std::size_t c = q.cell(s, p, a);
                    if (block.visits[c] == 0) continue;
                    out << key.tau << ',' << key.delta_key << ',' << s << ',' << p << ',' << a
                        << ',' << format_number(block.value[c]) << ',' << block.visits[c] << '\n';
                }
            }
        }
    }
}

SparseQ read_q_table(std::istream& in, ArtifactMeta* meta_out) {
    const ArtifactMeta meta = read_header(in, kQMagic, kQColumns);
    SparseQ q(meta_variant(meta), meta_int(meta, "n_soc"), meta_int(meta, "n_peak"),
              meta_int(meta, "n_action"));
    std::string line;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 7) throw ParseError("expected 7 fields", line_no);
        const BlockKey key{int_field(f[0], line_no), int_field(f[1], line_no)};
        const int s = int_field(f[2], line_no);
        const int p = int_field(f[3], line_no);
        const int a = int_field(f[4], line_no);
        check_range(s, q.n_soc(), "soc", line_no);
        check_range(p, q.n_peak(), "peak", line_no);
        check_range(a, q.n_action(), "action", line_no);
        const double value = parse_number(f[5], line_no);
        const int visits = int_field(f[6], line_no);
        if (visits < 1) throw ParseError("visits must be positive", line_no);
        q.set(key, s, p, a, value, static_cast<std::uint32_t>(visits));
    }
    if (meta_out) *meta_out = meta;
    return q;
}

void write_policy(std::ostream& out, const Policy& policy, const ArtifactMeta& meta) {
    ArtifactMeta m = meta;
    m["variant"] = to_string(policy.variant());
    m["n_soc"] = std::to_string(policy.n_soc());
    m["n_peak"] = std::to_string(policy.n_peak());
    m["fallback"] = to_string(policy.fallback());
    write_header(out, kPolicyMagic, m);
    out << kPolicyColumns << '\n';
    for (const auto& [key, actions] : policy.table()) {
        for (int s = 0; s < policy.n_soc(); ++s) {
            for (int p = 0; p < policy.n_peak(); ++p) {
                const auto a = actions[static_cast<std::size_t>(s * policy.n_peak() + p)];
                if (a == Policy::kAbsent) continue;
                out << key.tau << ',' << key.delta_key << ',' << s << ',' << p << ',' << a << '\n';
            }
        }
    }
}

Policy read_policy(std::istream& in, ArtifactMeta* meta_out) {
    const ArtifactMeta meta = read_header(in, kPolicyMagic, kPolicyColumns);
    ControllerKind fallback = ControllerKind::Lazy;
    if (const auto it = meta.find("fallback"); it != meta.end()) {
        try {
            fallback = parse_controller(it->second);
        } catch (const ConfigError& e) {
            throw ArtifactMismatch(e.what());
        }
    }
    Policy policy(meta_variant(meta), meta_int(meta, "n_soc"), meta_int(meta, "n_peak"), fallback);
    std::string line;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 5) throw ParseError("expected 5 fields", line_no);
        const BlockKey key{int_field(f[0], line_no), int_field(f[1], line_no)};
        const int s = int_field(f[2], line_no);
        const int p = int_field(f[3], line_no);
        const int a = int_field(f[4], line_no);
        check_range(s, policy.n_soc(), "soc", line_no);
        check_range(p, policy.n_peak(), "peak", line_no);
        if (a < 0) throw ParseError("negative action index", line_no);
        policy.set(key, s, p, a);
    }
    if (meta_out) *meta_out = meta;
    return policy;
}

void save_q_table(const std::filesystem::path& path, const SparseQ& q, const ArtifactMeta& meta) {
    write_file(path, [&](std::ostream& out) { write_q_table(out, q, meta); });
}

SparseQ load_q_table(const std::filesystem::path& path, ArtifactMeta* meta) {
    return read_file<SparseQ>(path, meta, [](std::istream& in, ArtifactMeta* m) {
        return read_q_table(in, m);
    });
}

void save_policy(const std::filesystem::path& path, const Policy& policy,
                 const ArtifactMeta& meta) {
    write_file(path, [&](std::ostream& out) { write_policy(out, policy, meta); });
}

Policy load_policy(const std::filesystem::path& path, ArtifactMeta* meta) {
    return read_file<Policy>(path, meta, [](std::istream& in, ArtifactMeta* m) {
        return read_policy(in, m);
    });
}

void require_meta(const ArtifactMeta& meta, const std::string& key, const std::string& expected) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ArtifactMismatch("artifact lacks meta field " + key);
    if (it->second != expected) {
        throw ArtifactMismatch("artifact " + key + " is '" + it->second + "', expected '" +
                               expected + "'");
    }
}

}  // namespace dcmin
