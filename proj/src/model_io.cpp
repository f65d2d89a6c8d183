#include "beliefcert/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace beliefcert {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Line line{number, {}};
        std::string tok;
        while (ls >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

double parse_number(const Line& line, const std::string& tok) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line.number, "expected a number, got '" + tok + "'");
    }
}

bool is_section(const std::string& tok) {
    return tok == "format" || tok == "states" || tok == "dist" || tok == "actions" ||
           tok == "observations" || tok == "obs_dist" || tok == "kernel" || tok == "channel" ||
           tok == "cost" || tok == "prior" || tok == "discount";
}

std::vector<double> numeric_row(const Line& line) {
    std::vector<double> row;
    row.reserve(line.tokens.size());
    for (const auto& t : line.tokens) row.push_back(parse_number(line, t));
    return row;
}

} // namespace

PomdpModel parse_model(const std::string& text) {
    const auto lines = tokenize(text);
    PomdpModel m;
    std::vector<double> state_coords, obs_coords;
    bool states_have_coords = false, obs_have_coords = false;
    std::vector<std::vector<double>> state_dist, obs_dist;
    std::vector<std::pair<std::string, std::vector<std::vector<double>>>> kernels;
    std::vector<std::vector<double>> channel_rows, cost_rows;
    std::vector<double> prior_row;
    bool saw_states = false, saw_actions = false, saw_obs = false, saw_channel = false;
    bool saw_cost = false, saw_prior = false;

    std::size_t i = 0;
    while (i < lines.size()) {
        const Line& head = lines[i];
        const std::string& key = head.tokens[0];
        if (!is_section(key)) throw ParseError(head.number, "unknown section '" + key + "'");

        if (key == "format") {
            if (head.tokens.size() != 3 || head.tokens[1] != "pomdp-model")
                throw ParseError(head.number, "expected 'format pomdp-model <version>'");
            ++i;
        } else if (key == "discount") {
            if (head.tokens.size() != 2) throw ParseError(head.number, "expected 'discount <v>'");
            m.discount = parse_number(head, head.tokens[1]);
            ++i;
        } else if (key == "states" || key == "observations") {
            const bool st = key == "states";
            if (st) saw_states = true;
            else saw_obs = true;
            auto& coords = st ? state_coords : obs_coords;
            auto& have_coords = st ? states_have_coords : obs_have_coords;
            std::vector<std::string> labels;
            ++i;
            bool first = true;
            while (i < lines.size() && !is_section(lines[i].tokens[0])) {
                const Line& ln = lines[i];
                if (ln.tokens.size() > 2)
                    throw ParseError(ln.number, "expected 'label [coordinate]'");
                labels.push_back(ln.tokens[0]);
                const bool has = ln.tokens.size() == 2;
                if (first) have_coords = has;
                else if (has != have_coords)
                    throw ParseError(ln.number, "coordinates must appear on all points or none");
                if (has) coords.push_back(parse_number(ln, ln.tokens[1]));
                first = false;
                ++i;
            }
            if (labels.empty()) throw ParseError(head.number, key + " section is empty");
            if (st) m.state_space.labels = labels;
            else m.obs_space.labels = labels;
        } else if (key == "actions") {
            saw_actions = true;
            ++i;
            while (i < lines.size() && !is_section(lines[i].tokens[0])) {
                for (const auto& t : lines[i].tokens) m.action_labels.push_back(t);
                ++i;
            }
            if (m.action_labels.empty()) throw ParseError(head.number, "actions section is empty");
        } else if (key == "dist" || key == "obs_dist") {
            auto& d = key == "dist" ? state_dist : obs_dist;
            ++i;
            while (i < lines.size() && !is_section(lines[i].tokens[0])) {
                d.push_back(numeric_row(lines[i]));
                ++i;
            }
            if (d.empty()) throw ParseError(head.number, key + " section is empty");
        } else if (key == "kernel") {
            if (head.tokens.size() != 2)
                throw ParseError(head.number, "expected 'kernel <action-label>'");
            std::vector<std::vector<double>> rows;
            ++i;
            while (i < lines.size() && !is_section(lines[i].tokens[0])) {
                rows.push_back(numeric_row(lines[i]));
                ++i;
            }
            if (rows.empty()) throw ParseError(head.number, "kernel matrix is empty");
            kernels.emplace_back(head.tokens[1], std::move(rows));
        } else if (key == "channel" || key == "cost") {
            auto& rows = key == "channel" ? channel_rows : cost_rows;
            (key == "channel" ? saw_channel : saw_cost) = true;
            ++i;
            while (i < lines.size() && !is_section(lines[i].tokens[0])) {
                rows.push_back(numeric_row(lines[i]));
                ++i;
            }
            if (rows.empty()) throw ParseError(head.number, key + " matrix is empty");
        } else { // prior
            saw_prior = true;
            ++i;
            while (i < lines.size() && !is_section(lines[i].tokens[0])) {
                for (const auto& t : lines[i].tokens)
                    prior_row.push_back(parse_number(lines[i], t));
                ++i;
            }
            if (prior_row.empty()) throw ParseError(head.number, "prior section is empty");
        }
    }

    auto missing = [&](bool saw, const char* what) {
        if (!saw) throw ParseError(lines.empty() ? 1 : lines.back().number,
                                   std::string("missing section '") + what + "'");
    };
    missing(saw_states, "states");
    missing(saw_actions, "actions");
    missing(saw_obs, "observations");
    missing(!kernels.empty(), "kernel");
    missing(saw_channel, "channel");
    missing(saw_cost, "cost");
    missing(saw_prior, "prior");

    // Assemble metric spaces: explicit matrix wins over coordinates.
    auto build_space = [&](FiniteMetricSpace& space, std::vector<double>& coords,
                           bool have_coords, std::vector<std::vector<double>>& dist,
                           const char* what) {
        if (!dist.empty()) {
            if (dist.size() != space.labels.size())
                throw ParseError(1, std::string(what) + " dist matrix size mismatch");
            space.dist = std::move(dist);
        } else if (have_coords) {
            auto labels = space.labels;
            space = FiniteMetricSpace::from_coords(std::move(coords), std::move(labels));
        } else {
            // default discrete metric
            const std::size_t n = space.labels.size();
            space.dist.assign(n, std::vector<double>(n, 1.0));
            for (std::size_t k = 0; k < n; ++k) space.dist[k][k] = 0.0;
        }
    };
    build_space(m.state_space, state_coords, states_have_coords, state_dist, "states");
    build_space(m.obs_space, obs_coords, obs_have_coords, obs_dist, "observations");

    // Kernel matrices keyed by action label, in action order.
    m.kernel.probs.resize(m.action_labels.size());
    std::vector<bool> seen(m.action_labels.size(), false);
    for (auto& [label, rows] : kernels) {
        const auto it = std::find(m.action_labels.begin(), m.action_labels.end(), label);
        if (it == m.action_labels.end())
            throw ParseError(1, "kernel for unknown action '" + label + "'");
        const std::size_t a = std::size_t(it - m.action_labels.begin());
        if (seen[a]) throw ParseError(1, "duplicate kernel for action '" + label + "'");
        seen[a] = true;
        m.kernel.probs[a] = std::move(rows);
    }
    for (std::size_t a = 0; a < seen.size(); ++a)
        if (!seen[a]) throw ParseError(1, "missing kernel for action '" + m.action_labels[a] + "'");

    m.channel.probs = std::move(channel_rows);
    m.cost = std::move(cost_rows);
    m.prior.weights = std::move(prior_row);
    return m;
}

PomdpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

std::string format_model(const PomdpModel& m) {
    std::ostringstream out;
    out << "format pomdp-model 1\n\nstates\n";
    for (std::size_t i = 0; i < m.state_space.size(); ++i) {
        out << m.state_space.labels[i];
        if (m.state_space.coords) out << ' ' << num((*m.state_space.coords)[i]);
        out << '\n';
    }
    if (!m.state_space.coords) {
        out << "\ndist\n";
        for (const auto& row : m.state_space.dist) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << num(row[j]);
            out << '\n';
        }
    }
    out << "\nactions\n";
    for (const auto& a : m.action_labels) out << a << '\n';
    out << "\nobservations\n";
    for (std::size_t i = 0; i < m.obs_space.size(); ++i) {
        out << m.obs_space.labels[i];
        if (m.obs_space.coords) out << ' ' << num((*m.obs_space.coords)[i]);
        out << '\n';
    }
    if (!m.obs_space.coords) {
        out << "\nobs_dist\n";
        for (const auto& row : m.obs_space.dist) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << num(row[j]);
            out << '\n';
        }
    }
    for (std::size_t a = 0; a < m.num_actions(); ++a) {
        out << "\nkernel " << m.action_labels[a] << '\n';
        for (const auto& row : m.kernel.probs[a]) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << num(row[j]);
            out << '\n';
        }
    }
    out << "\nchannel\n";
    for (const auto& row : m.channel.probs) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << num(row[j]);
        out << '\n';
    }
    out << "\ncost\n";
    for (const auto& row : m.cost) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << num(row[j]);
        out << '\n';
    }
    out << "\nprior\n";
    for (std::size_t j = 0; j < m.prior.size(); ++j) out << (j ? " " : "") << num(m.prior[j]);
    out << '\n';
    if (m.discount) out << "\ndiscount " << num(*m.discount) << '\n';
    return out.str();
}

void save_model(const PomdpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << format_model(model);
}

} // namespace beliefcert
