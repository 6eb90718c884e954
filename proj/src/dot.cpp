#include "sonarpath/dot.hpp"

#include "sonarpath/error.hpp"
#include "sonarpath/ids.hpp"

#include <algorithm>
#include <sstream>

namespace sonarpath {

namespace {

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

template <class T>
std::vector<const T*> sorted_by_id(const std::vector<T>& items)
{
    std::vector<const T*> out;
    for (const auto& i : items)
        out.push_back(&i);
    std::sort(out.begin(), out.end(), [](const T* a, const T* b) { return natural_less(a->id, b->id); });
    return out;
}

std::string join(const std::vector<std::string>& v)
{
    std::string out;
    for (const auto& s : v)
        out += (out.empty() ? "" : ",") + s;
    return out;
}

} // namespace

std::string model_to_dot(const Network& network)
{
    std::ostringstream out;
    out << "digraph " << quote(network.name().empty() ? "model" : network.name()) << " {\n";
    for (const Container* c : sorted_by_id(network.containers())) {
        const std::string label = c->name.empty() || c->name == c->id ? c->id : c->id + "\\n" + c->name;
        out << "  " << quote(c->id) << " [label=" << quote(label) << "];\n";
    }
    for (const Link* l : sorted_by_id(network.links()))
        out << "  " << quote(l->from) << " -> " << quote(l->to) << " [label=" << quote(l->id) << "];\n";
    out << "}\n";
    return out.str();
}

std::string report_to_dot(const RunReport& report, std::optional<std::size_t> path)
{
    if (path && *path >= report.paths.size())
        throw ReferenceError("path index " + std::to_string(*path) + " out of range (" +
                             std::to_string(report.paths.size()) + " paths)");
    std::ostringstream out;
    out << "digraph " << quote(report.scenario.name) << " {\n";
    const std::size_t first = path ? *path : 0;
    const std::size_t last = path ? *path + 1 : report.paths.size();
    for (std::size_t i = first; i < last; ++i) {
        const ReportPath& p = report.paths[i];
        const std::string prefix = "p" + std::to_string(i) + ":";
        out << "  subgraph " << quote("cluster_" + std::to_string(i)) << " {\n";
        out << "    label=" << quote("path " + std::to_string(i) + " (length " + std::to_string(p.length) + ")")
            << ";\n";
        if (p.connections.empty()) {
            out << "    " << quote(prefix + "0") << " [label=" << quote(report.scenario.start) << "];\n";
        } else {
            out << "    " << quote(prefix + "0") << " [label=" << quote(p.connections.front().start) << "];\n";
            for (std::size_t k = 0; k < p.connections.size(); ++k)
                out << "    " << quote(prefix + std::to_string(k + 1))
                    << " [label=" << quote(p.connections[k].end) << "];\n";
            for (std::size_t k = 0; k < p.connections.size(); ++k) {
                const ReportConnection& c = p.connections[k];
                std::string label = c.link + " [" + join(c.generic_rules) + "]";
                if (!c.normal_rules.empty())
                    label += " {" + join(c.normal_rules) + "}";
                out << "    " << quote(prefix + std::to_string(k)) << " -> " << quote(prefix + std::to_string(k + 1))
                    << " [label=" << quote(label) << "];\n";
            }
        }
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace sonarpath
