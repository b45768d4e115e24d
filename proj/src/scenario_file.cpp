#include "evplatoon/scenario_file.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "evplatoon/format.hpp"

namespace evp {

namespace {

std::string parse_message(const std::string& source, int line, int column,
                          const std::string& what) {
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": " << what;
    return msg.str();
}

struct Token {
    std::string value;
    int line = 0;
    int column = 0;
};

struct Section {
    int line = 0;
    std::map<std::string, Token> keys;
    std::vector<Token> followers;  // repeatable key, platoon only
};

const std::map<std::string, std::vector<std::string>>& section_schema() {
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"model", {"alpha", "beta", "kappa", "epsilon", "v_max"}},
        {"lead", {"kind", "accel", "breakpoints"}},
        {"platoon",
         {"lead_position", "lead_velocity", "follower", "count", "first_spacing", "spacing",
          "follower_velocity"}},
        {"sim", {"t0", "tf", "dt"}},
        {"battery", {"R_s", "R_1", "C_1", "R_2", "C_2", "C_n", "N_s", "N_p", "eta", "ocv"}},
        {"body", {"m", "rho", "A", "C_d", "C_r", "theta"}},
        {"scaling", {"length_scale", "time_scale"}},
    };
    return schema;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

class Parser {
  public:
    Parser(std::istream& in, std::string_view source) : in_(in), source_(source) {}

    std::map<std::string, Section> run() {
        std::string raw;
        int line_no = 0;
        std::string current;
        while (std::getline(in_, raw)) {
            ++line_no;
            std::string_view line{raw};
            if (auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            const auto content = trim(line);
            if (content.empty()) continue;
            const int column = static_cast<int>(line.find_first_not_of(" \t")) + 1;

            if (content.front() == '[') {
                if (content.back() != ']') fail(line_no, column, "expected ']' to close section");
                const std::string name{trim(content.substr(1, content.size() - 2))};
                if (!section_schema().count(name)) fail(line_no, column, "unknown section [" + name + "]");
                if (sections_.count(name)) fail(line_no, column, "duplicate section [" + name + "]");
                sections_[name].line = line_no;
                current = name;
                continue;
            }

            const auto eq = content.find('=');
            if (eq == std::string_view::npos) fail(line_no, column, "expected 'key = value'");
            if (current.empty()) fail(line_no, column, "key outside of any section");
            const std::string key{trim(content.substr(0, eq))};
            const std::string value{trim(content.substr(eq + 1))};
            const auto& allowed = section_schema().at(current);
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(line_no, column, "unknown key '" + key + "' in section [" + current + "]");
            }
            if (value.empty()) fail(line_no, column, "missing value for key '" + key + "'");
            auto& section = sections_[current];
            if (current == "platoon" && key == "follower") {
                section.followers.push_back({value, line_no, column});
            } else if (!section.keys.emplace(key, Token{value, line_no, column}).second) {
                fail(line_no, column, "duplicate key '" + key + "'");
            }
        }
        return std::move(sections_);
    }

    [[noreturn]] void fail(int line, int column, const std::string& what) const {
        throw ParseError(source_, line, column, what);
    }

  private:
    std::istream& in_;
    std::string source_;
    std::map<std::string, Section> sections_;
};

class Assembler {
  public:
    Assembler(std::map<std::string, Section> sections, std::string source)
        : sections_(std::move(sections)), source_(std::move(source)) {}

    Scenario build() {
        for (const char* name : {"model", "lead", "platoon", "sim"}) {
            if (!sections_.count(name)) {
                throw ParseError(source_, 1, 1, std::string("missing required section [") + name + "]");
            }
        }

        Scenario sc;
        build_model(sc);
        build_lead(sc);
        build_platoon(sc);
        build_sim(sc);
        build_battery(sc);
        return validate_scenario(sc);
    }

  private:
    const Token* find(const std::string& section, const std::string& key) const {
        auto sit = sections_.find(section);
        if (sit == sections_.end()) return nullptr;
        auto kit = sit->second.keys.find(key);
        return kit == sit->second.keys.end() ? nullptr : &kit->second;
    }

    const Token& require(const std::string& section, const std::string& key) const {
        const Token* tok = find(section, key);
        if (!tok) {
            throw ParseError(source_, sections_.at(section).line, 1,
                             "missing required key '" + key + "' in section [" + section + "]");
        }
        return *tok;
    }

    double number(const Token& tok) const {
        const char* begin = tok.value.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0') {
            throw ParseError(source_, tok.line, tok.column, "invalid number '" + tok.value + "'");
        }
        return v;
    }

    double number_or(const std::string& section, const std::string& key, double fallback) const {
        const Token* tok = find(section, key);
        return tok ? number(*tok) : fallback;
    }

    int integer(const Token& tok) const {
        const double v = number(tok);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) {
            throw ParseError(source_, tok.line, tok.column, "expected an integer, got '" + tok.value + "'");
        }
        return i;
    }

    // "a:b, a:b, ..." pair list
    std::vector<std::pair<double, double>> pair_list(const Token& tok) const {
        std::vector<std::pair<double, double>> out;
        std::stringstream ss{tok.value};
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                throw ParseError(source_, tok.line, tok.column,
                                 "expected 'a:b' pairs separated by commas");
            }
            Token a{std::string(trim(std::string_view(item).substr(0, colon))), tok.line, tok.column};
            Token b{std::string(trim(std::string_view(item).substr(colon + 1))), tok.line, tok.column};
            out.emplace_back(number(a), number(b));
        }
        if (out.empty()) {
            throw ParseError(source_, tok.line, tok.column, "empty pair list");
        }
        return out;
    }

    void reject(const std::string& section, const std::string& key, const std::string& why) const {
        if (const Token* tok = find(section, key)) {
            throw ParseError(source_, tok->line, tok->column, "key '" + key + "' " + why);
        }
    }

    void build_model(Scenario& sc) const {
        sc.params.alpha = number(require("model", "alpha"));
        sc.params.beta = number(require("model", "beta"));
        sc.params.kappa = number(require("model", "kappa"));
        sc.params.epsilon = number_or("model", "epsilon", 1e-6);
        sc.params.v_max = number_or("model", "v_max", v_max_supremum());
    }

    void build_lead(Scenario& sc) const {
        const Token& kind = require("lead", "kind");
        if (kind.value == "constant") {
            reject("lead", "breakpoints", "is only valid for kind = table");
            sc.lead = LeadProfile::constant(number_or("lead", "accel", 0.0));
        } else if (kind.value == "table") {
            reject("lead", "accel", "is only valid for kind = constant");
            const Token& tok = require("lead", "breakpoints");
            try {
                sc.lead = LeadProfile::table(pair_list(tok));
            } catch (const std::invalid_argument& e) {
                throw ParseError(source_, tok.line, tok.column, e.what());
            }
        } else if (kind.value == "paper_fluctuating") {
            reject("lead", "accel", "is only valid for kind = constant");
            reject("lead", "breakpoints", "is only valid for kind = table");
            sc.lead = LeadProfile::paper_fluctuating();
        } else {
            throw ParseError(source_, kind.line, kind.column,
                             "unknown lead kind '" + kind.value +
                                 "' (expected constant, table, or paper_fluctuating)");
        }
    }

    void build_platoon(Scenario& sc) const {
        sc.initial.time = 0.0;
        sc.initial.lead.position = number(require("platoon", "lead_position"));
        sc.initial.lead.velocity = number(require("platoon", "lead_velocity"));

        const auto& section = sections_.at("platoon");
        const bool explicit_followers = !section.followers.empty();
        const bool rule = find("platoon", "count") != nullptr;
        if (explicit_followers && rule) {
            throw ParseError(source_, section.line, 1,
                             "give either 'follower' lines or the spacing rule, not both");
        }
        if (explicit_followers) {
            for (const auto& tok : section.followers) {
                std::stringstream ss{tok.value};
                double pos = 0.0, vel = 0.0;
                if (!(ss >> pos >> vel) || !(ss >> std::ws).eof()) {
                    throw ParseError(source_, tok.line, tok.column,
                                     "expected 'follower = <position> <velocity>'");
                }
                sc.initial.followers.push_back({pos, vel});
            }
        } else if (rule) {
            const int count = integer(require("platoon", "count"));
            if (count < 1) {
                const Token& tok = *find("platoon", "count");
                throw ParseError(source_, tok.line, tok.column, "count must be at least 1");
            }
            const double first = number(require("platoon", "first_spacing"));
            const double velocity = number(require("platoon", "follower_velocity"));
            double rest = 0.0;
            if (count > 1) {
                rest = number(require("platoon", "spacing"));
            } else {
                reject("platoon", "spacing", "is unused when count = 1");
            }
            double position = sc.initial.lead.position - first;
            for (int i = 0; i < count; ++i) {
                if (i > 0) position -= rest;
                sc.initial.followers.push_back({position, velocity});
            }
        } else {
            throw ParseError(source_, section.line, 1,
                             "platoon needs 'follower' lines or the spacing rule (count, "
                             "first_spacing, spacing, follower_velocity)");
        }
        sc.follower_models.assign(sc.initial.followers.size(), ModelKind::proposed);
    }

    void build_sim(Scenario& sc) const {
        sc.t0 = number_or("sim", "t0", 0.0);
        sc.tf = number(require("sim", "tf"));
        sc.dt = number_or("sim", "dt", 1e-3);
        sc.initial.time = sc.t0;
    }

    void build_battery(Scenario& sc) const {
        const bool has_battery = sections_.count("battery") > 0;
        for (const char* dependent : {"body", "scaling"}) {
            if (sections_.count(dependent) && !has_battery) {
                throw ParseError(source_, sections_.at(dependent).line, 1,
                                 std::string("section [") + dependent +
                                     "] requires a [battery] section");
            }
        }
        if (!has_battery) return;

        BatteryBlock blk;
        blk.cell.R_s = number_or("battery", "R_s", blk.cell.R_s);
        blk.cell.R_1 = number_or("battery", "R_1", blk.cell.R_1);
        blk.cell.C_1 = number_or("battery", "C_1", blk.cell.C_1);
        blk.cell.R_2 = number_or("battery", "R_2", blk.cell.R_2);
        blk.cell.C_2 = number_or("battery", "C_2", blk.cell.C_2);
        blk.cell.C_n = number_or("battery", "C_n", blk.cell.C_n);
        if (const Token* tok = find("battery", "N_s")) blk.cell.N_s = integer(*tok);
        if (const Token* tok = find("battery", "N_p")) blk.cell.N_p = integer(*tok);
        blk.cell.eta = number_or("battery", "eta", blk.cell.eta);
        if (const Token* tok = find("battery", "ocv")) {
            blk.cell.ocv_curve.clear();
            for (auto [soc, volts] : pair_list(*tok)) blk.cell.ocv_curve.push_back({soc, volts});
        }

        blk.body.m = number_or("body", "m", blk.body.m);
        blk.body.rho = number_or("body", "rho", blk.body.rho);
        blk.body.A = number_or("body", "A", blk.body.A);
        blk.body.C_d = number_or("body", "C_d", blk.body.C_d);
        blk.body.C_r = number_or("body", "C_r", blk.body.C_r);
        blk.body.theta = number_or("body", "theta", blk.body.theta);

        blk.scaling.length_scale = number_or("scaling", "length_scale", blk.scaling.length_scale);
        blk.scaling.time_scale = number_or("scaling", "time_scale", blk.scaling.time_scale);

        sc.battery = blk;
        sc.eta = blk.cell.eta;
    }

    std::map<std::string, Section> sections_;
    std::string source_;
};

}  // namespace

ParseError::ParseError(const std::string& source, int line_, int column_, const std::string& what)
    : std::runtime_error(parse_message(source, line_, column_, what)),
      line(line_),
      column(column_) {}

Scenario parse_scenario(std::istream& in, std::string_view source_name) {
    Parser parser(in, source_name);
    Assembler assembler(parser.run(), std::string(source_name));
    return assembler.build();
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    return parse_scenario(in, path);
}

void dump_scenario(std::ostream& out, const Scenario& sc) {
    out << "[model]\n";
    out << "alpha = " << num17(sc.params.alpha) << "\n";
    out << "beta = " << num17(sc.params.beta) << "\n";
    out << "kappa = " << num17(sc.params.kappa) << "\n";
    out << "epsilon = " << num17(sc.params.epsilon) << "\n";
    out << "v_max = " << num17(sc.params.v_max) << "\n";

    out << "\n[lead]\n";
    switch (sc.lead.kind) {
        case LeadProfile::Kind::constant:
            out << "kind = constant\n";
            out << "accel = " << num17(sc.lead.accel) << "\n";
            break;
        case LeadProfile::Kind::table: {
            out << "kind = table\n";
            out << "breakpoints = ";
            for (std::size_t i = 0; i < sc.lead.breakpoints.size(); ++i) {
                if (i > 0) out << ", ";
                out << num17(sc.lead.breakpoints[i].first) << ":"
                    << num17(sc.lead.breakpoints[i].second);
            }
            out << "\n";
            break;
        }
        case LeadProfile::Kind::paper_fluctuating:
            out << "kind = paper_fluctuating\n";
            break;
    }

    out << "\n[platoon]\n";
    out << "lead_position = " << num17(sc.initial.lead.position) << "\n";
    out << "lead_velocity = " << num17(sc.initial.lead.velocity) << "\n";
    for (const auto& f : sc.initial.followers) {
        out << "follower = " << num17(f.position) << " " << num17(f.velocity) << "\n";
    }

    out << "\n[sim]\n";
    out << "t0 = " << num17(sc.t0) << "\n";
    out << "tf = " << num17(sc.tf) << "\n";
    out << "dt = " << num17(sc.dt) << "\n";

    if (sc.battery) {
        const auto& blk = *sc.battery;
        out << "\n[battery]\n";
        out << "R_s = " << num17(blk.cell.R_s) << "\n";
        out << "R_1 = " << num17(blk.cell.R_1) << "\n";
        out << "C_1 = " << num17(blk.cell.C_1) << "\n";
        out << "R_2 = " << num17(blk.cell.R_2) << "\n";
        out << "C_2 = " << num17(blk.cell.C_2) << "\n";
        out << "C_n = " << num17(blk.cell.C_n) << "\n";
        out << "N_s = " << blk.cell.N_s << "\n";
        out << "N_p = " << blk.cell.N_p << "\n";
        out << "eta = " << num17(blk.cell.eta) << "\n";
        out << "ocv = ";
        for (std::size_t i = 0; i < blk.cell.ocv_curve.size(); ++i) {
            if (i > 0) out << ", ";
            out << num17(blk.cell.ocv_curve[i].soc) << ":" << num17(blk.cell.ocv_curve[i].volts);
        }
        out << "\n";

        out << "\n[body]\n";
        out << "m = " << num17(blk.body.m) << "\n";
        out << "rho = " << num17(blk.body.rho) << "\n";
        out << "A = " << num17(blk.body.A) << "\n";
        out << "C_d = " << num17(blk.body.C_d) << "\n";
        out << "C_r = " << num17(blk.body.C_r) << "\n";
        out << "theta = " << num17(blk.body.theta) << "\n";

        out << "\n[scaling]\n";
        out << "length_scale = " << num17(blk.scaling.length_scale) << "\n";
        out << "time_scale = " << num17(blk.scaling.time_scale) << "\n";
    }
}

bool is_builtin_scenario(std::string_view name) {
    return name == "fig1a" || name == "fig1b" || name == "table1";
}

std::vector<std::string> builtin_scenario_names() { return {"fig1a", "fig1b", "table1"}; }

Scenario builtin_scenario(std::string_view name) {
    Scenario sc;
    sc.params = {};
    sc.params.v_max = v_max_supremum();
    if (name == "fig1a" || name == "fig1b") {
        // Two-vehicle relaxation runs: constant-speed lead, long horizon.
        sc.lead = LeadProfile::constant(0.0);
        sc.t0 = 0.0;
        sc.tf = 700.0;
        sc.dt = 1e-3;
        if (name == "fig1a") {
            sc.initial.lead = {0.1, 0.1};
            sc.initial.followers = {{0.0, 1.9}};
        } else {
            sc.initial.lead = {10.0, 1.0};
            sc.initial.followers = {{0.0, 0.5}};
        }
        sc.follower_models = {ModelKind::proposed};
        return sc;
    }
    if (name == "table1") {
        // 6-vehicle platoon under the fluctuating lead profile: the first
        // follower starts 0.3 behind the lead at 1.1x its speed, the rest are
        // evenly spaced 3.5 apart.
        sc.lead = LeadProfile::paper_fluctuating();
        sc.t0 = 0.0;
        sc.tf = 70.0;
        sc.dt = 1e-3;
        sc.eta = 0.8;
        const double v0 = 1.7;
        sc.initial.lead = {0.0, v0};
        double position = -0.3;
        for (int i = 0; i < 5; ++i) {
            if (i > 0) position -= 3.5;
            sc.initial.followers.push_back({position, 1.1 * v0});
        }
        sc.follower_models.assign(5, ModelKind::proposed);
        return sc;
    }
    throw std::invalid_argument("unknown builtin scenario '" + std::string(name) + "'");
}

Scenario load_scenario(const std::string& name_or_path) {
    if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path);
    return parse_scenario_file(name_or_path);
}

}  // namespace evp
