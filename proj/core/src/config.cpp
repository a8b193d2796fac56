#include "lcstf/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "lcstf/csv.hpp"

namespace lcstf {

namespace {

struct Key {
    std::string name;
    std::string doc;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, std::string_view)> set;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view value, std::string_view expected) {
    throw std::invalid_argument("expected " + std::string(expected) + ", got '" + std::string(value) + "'");
}

double parse_double(std::string_view v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        bad_value(v, "a number");
    }
    return out;
}

template <class Int>
Int parse_int(std::string_view v) {
    Int out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        bad_value(v, "an integer");
    }
    return out;
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(v, "true or false");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string format_int_list(const std::vector<int>& xs) {
    std::string out;
    for (int x : xs) {
        out += (out.empty() ? "" : ",") + format_number(x);
    }
    return out;
}

std::vector<int> parse_int_list(std::string_view v) {
    std::vector<int> out;
    for (std::string_view part : split(v, ',')) {
        out.push_back(parse_int<int>(part));
    }
    return out;
}

std::string format_profiles(const std::vector<DriverProfile>& ps) {
    std::string out;
    for (const DriverProfile& p : ps) {
        out += (out.empty() ? "" : ",") + p.name + ":" + format_number(p.body_length) + ":" +
               format_number(p.sigma);
    }
    return out;
}

std::vector<DriverProfile> parse_profiles(std::string_view v) {
    std::vector<DriverProfile> out;
    for (std::string_view entry : split(v, ',')) {
        const auto fields = split(entry, ':');
        if (fields.size() != 3 || fields[0].empty()) {
            bad_value(entry, "name:length:sigma");
        }
        out.push_back(DriverProfile{std::string(fields[0]), parse_double(fields[1]), parse_double(fields[2])});
    }
    return out;
}

template <class T>
Key make_key(std::string name, std::string doc, std::function<T&(ExperimentConfig&)> field) {
    Key k;
    k.name = std::move(name);
    k.doc = std::move(doc);
    k.get = [field](const ExperimentConfig& c) {
        const T& value = field(const_cast<ExperimentConfig&>(c));
        if constexpr (std::is_same_v<T, bool>) {
            return std::string(value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, double>) {
            return format_number(value);
        } else {
            return format_number(static_cast<std::int64_t>(value));
        }
    };
    k.set = [field](ExperimentConfig& c, std::string_view v) {
        if constexpr (std::is_same_v<T, bool>) {
            field(c) = parse_bool(v);
        } else if constexpr (std::is_same_v<T, double>) {
            field(c) = parse_double(v);
        } else {
            field(c) = parse_int<T>(v);
        }
    };
    return k;
}

#define LCSTF_KEY(type, name, doc, expr) \
    make_key<type>(name, doc, [](ExperimentConfig& c) -> type& { return expr; })

const std::vector<Key>& registry() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        k.push_back(LCSTF_KEY(double, "road.total_length", "segment length [m]", c.sim.road.total_length));
        k.push_back(LCSTF_KEY(double, "road.warmup_length", "injection zone at the segment start, excluded from statistics [m]",
                              c.sim.road.warmup_length));
        k.push_back(LCSTF_KEY(int, "road.lane_count", "number of lanes (>= 2); observation length is 23 + 2 * lanes",
                              c.sim.road.lane_count));
        k.push_back(LCSTF_KEY(double, "road.lane_width", "lane width [m]", c.sim.road.lane_width));
        k.push_back(LCSTF_KEY(double, "road.v_max", "speed limit [m/s] (75 mph)", c.sim.road.v_max));

        k.push_back(LCSTF_KEY(double, "sim.dt", "step and action interval [s]", c.sim.dt));
        k.push_back(LCSTF_KEY(double, "sim.injection_rate", "mean injection rate [veh/h], Bernoulli per step", c.sim.injection_rate));
        k.push_back(LCSTF_KEY(double, "sim.agent_fraction", "probability that an injected vehicle is an RL agent", c.sim.agent_fraction));
        k.push_back(LCSTF_KEY(double, "sim.injection_speed", "initial speed of injected vehicles [m/s] (45 mph)", c.sim.injection_speed));
        k.push_back(LCSTF_KEY(int, "sim.episode_steps", "steps per episode", c.sim.episode_steps));
        k.push_back(LCSTF_KEY(std::uint64_t, "sim.seed", "master seed; every random stream is derived from it", c.sim.seed));
        k.push_back(LCSTF_KEY(double, "sim.maneuver_duration", "duration of a lane change [s]", c.sim.maneuver_duration));
        k.push_back(LCSTF_KEY(double, "sim.hv_lane_change_interval", "seconds between lane-change evaluations of one HV",
                              c.sim.hv_lane_change_interval));
        k.push_back(LCSTF_KEY(double, "sim.entry_clearance", "free length required at the segment start to inject [m]",
                              c.sim.entry_clearance));
        k.push_back(LCSTF_KEY(double, "sim.surround_range", "neighbourhood radius for observations and lane-change checks [m]",
                              c.sim.surround_range));
        k.push_back(LCSTF_KEY(int, "sim.initial_agents", "agents placed on the road at reset", c.sim.initial_agents));
        k.push_back(LCSTF_KEY(double, "sim.agent_length", "agent body length [m]", c.sim.agent_length));
        k.push_back(LCSTF_KEY(double, "sim.v0_min_factor", "lower bound of HV desired speed as a fraction of v_max",
                              c.sim.v0_min_factor));
        k.push_back(LCSTF_KEY(double, "sim.v0_max_factor", "upper bound of HV desired speed as a fraction of v_max",
                              c.sim.v0_max_factor));
        {
            Key p;
            p.name = "sim.hv_profiles";
            p.doc = "human-driver types as name:body_length:sigma, comma separated";
            p.get = [](const ExperimentConfig& c) { return format_profiles(c.sim.hv_profiles); };
            p.set = [](ExperimentConfig& c, std::string_view v) { c.sim.hv_profiles = parse_profiles(v); };
            k.push_back(std::move(p));
        }

        k.push_back(LCSTF_KEY(double, "idm.T", "IDM time headway [s]", c.sim.idm.time_headway));
        k.push_back(LCSTF_KEY(double, "idm.a_max", "IDM maximum acceleration [m/s^2]", c.sim.idm.a_max));
        k.push_back(LCSTF_KEY(double, "idm.b", "IDM comfortable deceleration [m/s^2]", c.sim.idm.comfortable_decel));
        k.push_back(LCSTF_KEY(double, "idm.s0", "IDM minimum gap [m]", c.sim.idm.min_gap));
        k.push_back(LCSTF_KEY(double, "idm.delta", "IDM free-road exponent", c.sim.idm.delta));

        k.push_back(LCSTF_KEY(double, "mobil.politeness", "weight of follower accelerations in the incentive", c.sim.mobil.politeness));
        k.push_back(LCSTF_KEY(double, "mobil.accel_threshold", "minimum incentive to change lanes [m/s^2]",
                              c.sim.mobil.accel_threshold));
        k.push_back(LCSTF_KEY(double, "mobil.safe_decel", "largest deceleration imposed on the new follower [m/s^2]",
                              c.sim.mobil.safe_decel));

        k.push_back(LCSTF_KEY(double, "reward.w1", "efficiency weight", c.reward.weights.w1));
        k.push_back(LCSTF_KEY(double, "reward.w2", "safety weight", c.reward.weights.w2));
        k.push_back(LCSTF_KEY(double, "reward.w3", "comfort weight", c.reward.weights.w3));
        k.push_back(LCSTF_KEY(double, "reward.w4", "lane-change utility weight", c.reward.weights.w4));
        k.push_back(LCSTF_KEY(double, "reward.v_min", "minimum average speed of the efficiency terms [m/s] (45 mph)",
                              c.sim.road.v_min));
        k.push_back(LCSTF_KEY(bool, "reward.comfort_literal", "use -delta_a / jerk_max^2 instead of -(jerk / jerk_max)^2",
                              c.reward.comfort_literal));
        k.push_back(LCSTF_KEY(double, "reward.t_min_gap", "longitudinal safety threshold [m]", c.reward.t_min_gap));
        k.push_back(LCSTF_KEY(double, "reward.t_lat", "lateral safety threshold [m]", c.reward.t_lat));
        k.push_back(LCSTF_KEY(double, "reward.jerk_max", "largest possible jerk [m/s^3]", c.reward.jerk_max));
        k.push_back(LCSTF_KEY(bool, "reward.lon_only_during_maneuver", "apply the longitudinal term only while changing lanes",
                              c.reward.lon_only_during_maneuver));
        k.push_back(LCSTF_KEY(bool, "reward.lat_only_during_maneuver", "apply the lateral term only while changing lanes",
                              c.reward.lat_only_during_maneuver));

        k.push_back(LCSTF_KEY(double, "normalization.v_cap", "speed scale [m/s]", c.normalization.v_cap));
        k.push_back(LCSTF_KEY(double, "normalization.density", "density scale [veh/m]", c.normalization.density_scale));
        k.push_back(LCSTF_KEY(double, "normalization.lat_speed", "lateral speed scale [m/s]", c.normalization.lat_speed_scale));
        k.push_back(LCSTF_KEY(double, "normalization.lane_count", "lane count scale", c.normalization.lane_count_scale));

        k.push_back(LCSTF_KEY(int, "trainer.episodes", "training episodes", c.trainer.episodes));
        k.push_back(LCSTF_KEY(double, "trainer.gamma", "discount factor", c.trainer.gamma));
        k.push_back(LCSTF_KEY(int, "trainer.minibatch", "minibatch size", c.trainer.minibatch));
        k.push_back(LCSTF_KEY(double, "trainer.eps_start", "initial exploration rate", c.trainer.eps_start));
        k.push_back(LCSTF_KEY(double, "trainer.eps_end", "final exploration rate", c.trainer.eps_end));
        k.push_back(LCSTF_KEY(double, "trainer.eps_decay", "multiplicative exploration decay per gradient update",
                              c.trainer.eps_decay));
        k.push_back(LCSTF_KEY(std::size_t, "trainer.learning_start", "transitions stored before updates begin",
                              c.trainer.learning_start));
        k.push_back(LCSTF_KEY(int, "trainer.train_interval", "simulation steps between gradient updates", c.trainer.train_interval));
        k.push_back(LCSTF_KEY(int, "trainer.target_update_interval", "episodes between target network syncs",
                              c.trainer.target_update_interval));
        k.push_back(LCSTF_KEY(std::size_t, "trainer.buffer_capacity", "replay memory size", c.trainer.buffer_capacity));
        {
            Key h;
            h.name = "trainer.hidden_layers";
            h.doc = "hidden layer widths, comma separated";
            h.get = [](const ExperimentConfig& c) { return format_int_list(c.trainer.hidden_layers); };
            h.set = [](ExperimentConfig& c, std::string_view v) { c.trainer.hidden_layers = parse_int_list(v); };
            k.push_back(std::move(h));
        }
        {
            Key o;
            o.name = "trainer.optimizer";
            o.doc = "adam or sgd";
            o.get = [](const ExperimentConfig& c) {
                return std::string(c.trainer.optimizer.kind == OptimizerConfig::Kind::adam ? "adam" : "sgd");
            };
            o.set = [](ExperimentConfig& c, std::string_view v) {
                if (v == "adam") c.trainer.optimizer.kind = OptimizerConfig::Kind::adam;
                else if (v == "sgd") c.trainer.optimizer.kind = OptimizerConfig::Kind::sgd;
                else bad_value(v, "adam or sgd");
            };
            k.push_back(std::move(o));
        }
        k.push_back(LCSTF_KEY(double, "trainer.learning_rate", "optimizer step size", c.trainer.optimizer.learning_rate));
        k.push_back(LCSTF_KEY(double, "trainer.adam_beta1", "first-moment decay", c.trainer.optimizer.beta1));
        k.push_back(LCSTF_KEY(double, "trainer.adam_beta2", "second-moment decay", c.trainer.optimizer.beta2));
        k.push_back(LCSTF_KEY(double, "trainer.adam_epsilon", "denominator offset", c.trainer.optimizer.epsilon));
        k.push_back(LCSTF_KEY(int, "trainer.checkpoint_interval", "episodes between periodic checkpoints, 0 disables",
                              c.trainer.checkpoint_interval));
        k.push_back(LCSTF_KEY(int, "trainer.log_interval", "steps between intra-episode metric rows, 0 = episode end only",
                              c.trainer.log_interval));
        return k;
    }();
    return keys;
}

#undef LCSTF_KEY

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> names;
    for (const Key& k : registry()) {
        names.push_back(k.name);
    }
    return names;
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "# lcstf experiment configuration; SI units unless noted\n";
    std::string section;
    for (const Key& k : registry()) {
        const std::string prefix = k.name.substr(0, k.name.find('.'));
        if (prefix != section) {
            out << "\n# [" << prefix << "]\n";
            section = prefix;
        }
        out << "# " << k.doc << '\n' << k.name << " = " << k.get(config) << '\n';
    }
    return out.str();
}

ExperimentConfig parse_config(std::string_view text) {
    std::map<std::string, const Key*, std::less<>> index;
    for (const Key& k : registry()) {
        index.emplace(k.name, &k);
    }

    ExperimentConfig config;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? text.npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = index.find(key);
        if (it == index.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        if (const auto prev = seen.find(key); prev != seen.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) +
                              "' (first set on line " + std::to_string(prev->second) + ")");
        }
        seen.emplace(std::string(key), line_no);
        try {
            it->second->set(config, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + std::string(key) + ": " + e.what());
        }
    }

    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace lcstf
