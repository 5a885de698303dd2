#include "hqsim/hetjob.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace hqsim {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_int(std::string_view s, long& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// HH:MM:SS with MM, SS in [0,59]; zero total duration is malformed
bool parse_time(std::string_view s, Seconds& out) {
    const auto c1 = s.find(':');
    if (c1 == std::string_view::npos) return false;
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string_view::npos) return false;
    long hh = 0, mm = 0, ss = 0;
    if (!parse_int(s.substr(0, c1), hh) || !parse_int(s.substr(c1 + 1, c2 - c1 - 1), mm) ||
        !parse_int(s.substr(c2 + 1), ss))
        return false;
    if (s.substr(c1 + 1, c2 - c1 - 1).size() != 2 || s.substr(c2 + 1).size() != 2) return false;
    if (hh < 0 || mm < 0 || mm > 59 || ss < 0 || ss > 59) return false;
    const long total = hh * 3600 + mm * 60 + ss;
    if (total <= 0) return false;
    out = static_cast<Seconds>(total);
    return true;
}

struct ComponentBuilder {
    ResourceRequest request;
    int start_line = 1;
    bool saw_partition = false, saw_nodes = false, saw_time = false, saw_gres = false;
    bool any_directive = false;
};

} // namespace

const char* to_string(HetjobErrorKind kind) {
    switch (kind) {
    case HetjobErrorKind::UnknownDirective: return "UnknownDirective";
    case HetjobErrorKind::MalformedTime: return "MalformedTime";
    case HetjobErrorKind::MalformedGres: return "MalformedGres";
    case HetjobErrorKind::MalformedNodes: return "MalformedNodes";
    case HetjobErrorKind::MalformedPartition: return "MalformedPartition";
    case HetjobErrorKind::MissingWalltime: return "MissingWalltime";
    case HetjobErrorKind::DuplicateDirective: return "DuplicateDirective";
    case HetjobErrorKind::EmptyScript: return "EmptyScript";
    }
    return "?";
}

HetjobParse parse_hetjob(std::string_view script) {
    HetjobParse result;
    ComponentBuilder current;
    int component_id = 0;
    bool any_directive_at_all = false;

    auto finalize = [&]() {
        if (!current.saw_time)
            result.errors.push_back({HetjobErrorKind::MissingWalltime, current.start_line,
                                     "component " + std::to_string(component_id)});
        if (!current.saw_partition)
            current.request.partition =
                current.request.qpu_gres > 0 ? "quantum" : "classical";
        current.request.component_id = component_id;
        result.requests.push_back(current.request);
        ++component_id;
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= script.size()) {
        const auto nl = script.find('\n', pos);
        std::string_view raw = script.substr(pos, nl == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : nl - pos);
        pos = nl == std::string_view::npos ? script.size() + 1 : nl + 1;
        ++line_no;

        std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.substr(0, 7) != "#SBATCH") {
            if (line.front() == '#') continue; // shebang / comment
            result.command_payload.append(raw);
            result.command_payload.push_back('\n');
            continue;
        }

        std::string_view rest = trim(line.substr(7));
        if (rest == "hetjob") {
            if (any_directive_at_all) finalize();
            current = ComponentBuilder{};
            current.start_line = line_no;
            any_directive_at_all = true;
            continue;
        }
        if (rest.substr(0, 2) != "--") {
            result.errors.push_back({HetjobErrorKind::UnknownDirective, line_no,
                                     std::string(rest)});
            continue;
        }
        rest.remove_prefix(2);
        // value after '=' or whitespace
        std::string_view key = rest, value;
        const auto sep = rest.find_first_of("= \t");
        if (sep != std::string_view::npos) {
            key = rest.substr(0, sep);
            value = trim(rest.substr(sep + 1));
        }

        any_directive_at_all = true;
        current.any_directive = true;
        if (key == "partition") {
            if (current.saw_partition) {
                result.errors.push_back({HetjobErrorKind::DuplicateDirective, line_no, "partition"});
                continue;
            }
            current.saw_partition = true;
            if (value != "classical" && value != "quantum") {
                result.errors.push_back({HetjobErrorKind::MalformedPartition, line_no,
                                         std::string(value)});
                continue;
            }
            current.request.partition = std::string(value);
        } else if (key == "nodes") {
            if (current.saw_nodes) {
                result.errors.push_back({HetjobErrorKind::DuplicateDirective, line_no, "nodes"});
                continue;
            }
            current.saw_nodes = true;
            long n = 0;
            if (!parse_int(value, n) || n < 0) {
                result.errors.push_back({HetjobErrorKind::MalformedNodes, line_no,
                                         std::string(value)});
                continue;
            }
            current.request.nodes = static_cast<int>(n);
        } else if (key == "time") {
            if (current.saw_time) {
                result.errors.push_back({HetjobErrorKind::DuplicateDirective, line_no, "time"});
                continue;
            }
            Seconds t = 0;
            if (!parse_time(value, t)) {
                result.errors.push_back({HetjobErrorKind::MalformedTime, line_no,
                                         std::string(value)});
                continue;
            }
            current.saw_time = true;
            current.request.walltime = t;
        } else if (key == "gres") {
            if (current.saw_gres) {
                result.errors.push_back({HetjobErrorKind::DuplicateDirective, line_no, "gres"});
                continue;
            }
            current.saw_gres = true;
            long n = 0;
            if (value.substr(0, 4) != "qpu:" || !parse_int(value.substr(4), n) || n < 1) {
                result.errors.push_back({HetjobErrorKind::MalformedGres, line_no,
                                         std::string(value)});
                continue;
            }
            current.request.qpu_gres = static_cast<int>(n);
        } else {
            result.errors.push_back({HetjobErrorKind::UnknownDirective, line_no,
                                     "--" + std::string(key)});
        }
    }

    if (!any_directive_at_all) {
        result.requests.clear();
        result.errors.push_back({HetjobErrorKind::EmptyScript, 0, "no #SBATCH directives"});
        return result;
    }
    finalize();
    if (!result.ok()) result.requests.clear();
    return result;
}

std::string render_hetjob(const std::vector<ResourceRequest>& requests,
                          std::string_view command_payload) {
    std::ostringstream out;
    out << "#!/bin/bash\n";
    bool first = true;
    for (const auto& r : requests) {
        if (!first) out << "#SBATCH hetjob\n";
        first = false;
        out << "#SBATCH --partition " << r.partition << "\n";
        if (r.nodes > 0) out << "#SBATCH --nodes " << r.nodes << "\n";
        const long total = static_cast<long>(r.walltime + 0.5);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%02ld:%02ld:%02ld", total / 3600,
                      (total / 60) % 60, total % 60);
        out << "#SBATCH --time=" << buf << "\n";
        if (r.qpu_gres > 0) out << "#SBATCH --gres=qpu:" << r.qpu_gres << "\n";
    }
    if (!command_payload.empty()) out << "\n" << command_payload;
    return out.str();
}

std::string format_errors(const HetjobParse& parse, std::string_view filename) {
    std::ostringstream out;
    for (const auto& e : parse.errors) {
        out << filename << ":" << e.line << ": " << to_string(e.kind);
        if (!e.detail.empty()) out << " (" << e.detail << ")";
        out << "\n";
    }
    return out.str();
}

} // namespace hqsim
