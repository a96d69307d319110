#include "rcd/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rcd {

std::string location(YAML::Node const& node)
{
    if (!node.IsDefined() || node.Mark().is_null())
        return "config: ";
    return "config:" + std::to_string(node.Mark().line + 1) + ":"
           + std::to_string(node.Mark().column + 1) + ": ";
}

namespace {

double as_number(YAML::Node const& node, std::string const& path)
{
    if (!node.IsScalar())
        throw ConfigError(location(node) + "key '" + path + "': expected a number");
    try
    {
        return node.as<double>();
    }
    catch (YAML::Exception const&)
    {
        throw ConfigError(location(node) + "key '" + path + "': expected a number, got '"
                          + node.Scalar() + "'");
    }
}

std::string fmt_range(double lo, double hi)
{
    Json j = Json::array({lo, hi});
    return j.dump();
}

}  // namespace

NodeReader::NodeReader(YAML::Node node, std::string path, Json& echo)
    : node_(std::move(node)), path_(std::move(path)), echo_(echo)
{
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap())
        throw ConfigError(location(node_) + "key '" + path_ + "': expected a mapping");
    if (!echo_.is_object())
        echo_ = Json::object();
}

std::string NodeReader::key_path(std::string const& key) const
{
    return path_.empty() ? key : path_ + "." + key;
}

void NodeReader::fail(std::string const& key, std::string const& msg) const
{
    YAML::Node n = has(key) ? node_[key] : node_;
    throw ConfigError(location(n) + "key '" + key_path(key) + "': " + msg);
}

bool NodeReader::has(std::string const& key) const
{
    return node_.IsMap() && node_[key].IsDefined();
}

YAML::Node NodeReader::child(std::string const& key)
{
    used_.push_back(key);
    if (!has(key))
        return YAML::Node(YAML::NodeType::Undefined);
    return node_[key];
}

double NodeReader::number(std::string const& key, double def, double lo, double hi)
{
    used_.push_back(key);
    double v = def;
    if (has(key))
        v = as_number(node_[key], key_path(key));
    if (!(v >= lo && v <= hi) || !std::isfinite(v))
        fail(key, "value " + Json(v).dump() + " outside allowed range " + fmt_range(lo, hi));
    echo_[key] = v;
    return v;
}

double NodeReader::required_number(std::string const& key, double lo, double hi)
{
    if (!has(key))
        fail(key, "required key is missing");
    return number(key, 0.0, lo, hi);
}

std::size_t NodeReader::count(std::string const& key, std::size_t def, std::size_t lo,
                              std::size_t hi)
{
    used_.push_back(key);
    double v = static_cast<double>(def);
    if (has(key))
        v = as_number(node_[key], key_path(key));
    if (v != std::floor(v) || v < static_cast<double>(lo) || v > static_cast<double>(hi))
        fail(key, "expected an integer in " + fmt_range(static_cast<double>(lo),
                                                         static_cast<double>(hi)));
    auto n = static_cast<std::size_t>(v);
    echo_[key] = n;
    return n;
}

std::vector<double> NodeReader::numbers(std::string const& key, std::vector<double> def)
{
    used_.push_back(key);
    std::vector<double> out = std::move(def);
    if (has(key))
    {
        YAML::Node n = node_[key];
        if (!n.IsSequence())
            fail(key, "expected a list of numbers");
        out.clear();
        for (auto const& e : n)
            out.push_back(as_number(e, key_path(key)));
    }
    echo_[key] = out;
    return out;
}

void NodeReader::finish() const
{
    if (!node_.IsMap())
        return;
    for (auto const& kv : node_)
    {
        auto key = kv.first.as<std::string>();
        if (std::find(used_.begin(), used_.end(), key) == used_.end())
            throw ConfigError(location(kv.first) + "unknown key '" + key_path(key) + "'");
    }
}

CircleMap parse_map(YAML::Node const& node, std::string const& path)
{
    if (!node.IsMap() || node.size() != 1)
        throw ConfigError(location(node) + "key '" + path
                          + "': a map is an object with exactly one of moebius, perturbed, "
                            "rotation, diagonal, conjugate, inverse");
    auto const kind = node.begin()->first.as<std::string>();
    YAML::Node const body = node.begin()->second;
    std::string const sub = path + "." + kind;
    try
    {
        if (kind == "moebius")
        {
            if (!body.IsSequence() || body.size() != 4)
                throw ConfigError(location(body) + "key '" + sub + "': expected [a, b, c, d]");
            return MoebiusMap(as_number(body[0], sub), as_number(body[1], sub),
                              as_number(body[2], sub), as_number(body[3], sub));
        }
        if (kind == "perturbed")
        {
            Json ignored;
            NodeReader r(body, sub, ignored);
            double eps = r.required_number("eps", -1.0, 1.0);
            double k = r.number("k", 1.0, 1.0, 1e6);
            if (k != std::floor(k))
                r.fail("k", "frequency must be an integer");
            r.finish();
            return PerturbedMap(eps, static_cast<int>(k));
        }
        if (kind == "rotation")
            return MoebiusMap::rotation(as_number(body, sub));
        if (kind == "diagonal")
        {
            double s = as_number(body, sub);
            if (!(s > 0.0))
                throw ConfigError(location(body) + "key '" + sub + "': must be positive");
            return MoebiusMap::diagonal(s);
        }
        if (kind == "conjugate")
        {
            Json ignored;
            NodeReader r(body, sub, ignored);
            auto inner = parse_map(r.child("map"), sub + ".map");
            double by = r.required_number("by", -1e6, 1e6);
            r.finish();
            auto const* m = std::get_if<MoebiusMap>(&inner);
            if (!m)
                throw ConfigError(location(body) + "key '" + sub
                                  + "': only Moebius maps can be conjugated");
            return compose(compose(MoebiusMap::rotation(by), *m), MoebiusMap::rotation(-by));
        }
        if (kind == "inverse")
        {
            auto inner = parse_map(body, sub);
            auto const* m = std::get_if<MoebiusMap>(&inner);
            if (!m)
                throw ConfigError(location(body) + "key '" + sub
                                  + "': only Moebius maps can be inverted");
            return m->inverse();
        }
    }
    catch (std::invalid_argument const& e)
    {
        throw ConfigError(location(body) + "key '" + sub + "': " + e.what());
    }
    throw ConfigError(location(node) + "key '" + path + "': unknown map kind '" + kind + "'");
}

Json map_to_json(CircleMap const& g)
{
    if (auto const* m = std::get_if<MoebiusMap>(&g))
        return {{"moebius", Json::array({m->a(), m->b(), m->c(), m->d()})}};
    auto const& p = std::get<PerturbedMap>(g);
    return {{"perturbed", {{"eps", p.eps()}, {"k", p.frequency()}}}};
}

GeneratorSystem parse_system(YAML::Node const& node, std::vector<Attractor>& attractors,
                             Json& echo)
{
    if (!node.IsDefined())
        throw ConfigError("config: key 'system': required block is missing");
    Json scratch;
    NodeReader r(node, "system", scratch);
    YAML::Node gens = r.child("generators");
    if (!gens.IsSequence() || gens.size() == 0)
        r.fail("generators", "expected a non-empty list of maps");
    std::vector<CircleMap> maps;
    for (std::size_t i = 0; i < gens.size(); ++i)
        maps.push_back(parse_map(gens[i], "system.generators[" + std::to_string(i) + "]"));

    YAML::Node w = r.child("weights");
    Weighting weighting;
    Json weights_echo;
    if (!w.IsDefined())
    {
        // uniform weights by default
        ConstantWeights cw{std::vector<double>(maps.size(), 1.0 / static_cast<double>(maps.size()))};
        weights_echo = cw.p;
        weighting = std::move(cw);
    }
    else if (w.IsSequence())
    {
        ConstantWeights cw;
        for (auto const& e : w)
            cw.p.push_back(as_number(e, "system.weights"));
        weights_echo = cw.p;
        weighting = std::move(cw);
    }
    else if (w.IsMap() && w["cosine"].IsDefined() && w.size() == 1)
    {
        CosineWeights cw;
        for (auto const& e : w["cosine"])
        {
            if (!e.IsSequence() || e.size() != 3)
                throw ConfigError(location(e)
                                  + "key 'system.weights.cosine': each term is [scale, amplitude, phase]");
            cw.terms.push_back({as_number(e[0], "system.weights.cosine"),
                                as_number(e[1], "system.weights.cosine"),
                                as_number(e[2], "system.weights.cosine")});
            weights_echo["cosine"].push_back(
                Json::array({cw.terms.back().scale, cw.terms.back().amplitude,
                             cw.terms.back().phase}));
        }
        weighting = std::move(cw);
    }
    else
    {
        r.fail("weights", "expected a list of probabilities or {cosine: [...]}");
    }

    attractors.clear();
    YAML::Node att = r.child("attractors");
    Json att_echo = Json::array();
    if (att.IsDefined())
    {
        if (!att.IsSequence())
            r.fail("attractors", "expected a list");
        for (std::size_t i = 0; i < att.size(); ++i)
        {
            std::string const p = "system.attractors[" + std::to_string(i) + "]";
            Attractor a;
            Json one;
            NodeReader ar(att[i], p, one);
            YAML::Node lbl = ar.child("label");
            a.label = lbl.IsDefined() ? lbl.as<std::string>() : std::to_string(i);
            a.points = ar.numbers("points", {});
            if (a.points.empty())
                ar.fail("points", "attractor needs at least one point");
            ar.finish();
            att_echo.push_back({{"label", a.label}, {"points", a.points}});
            attractors.push_back(std::move(a));
        }
    }
    r.finish();

    try
    {
        GeneratorSystem sys(std::move(maps), std::move(weighting));
        echo["generators"] = Json::array();
        for (auto const& g : sys.generators())
            echo["generators"].push_back(map_to_json(g));
        echo["weights"] = weights_echo;
        echo["attractors"] = att_echo;
        return sys;
    }
    catch (std::invalid_argument const& e)
    {
        std::string msg = e.what();
        YAML::Node at = msg.rfind("weights", 0) == 0 ? w : node;
        throw ConfigError(location(at) + "key 'system." + msg.substr(0, msg.find(':')) + "'"
                          + msg.substr(msg.find(':')));
    }
}

HyperbolicParams parse_hyperbolic(YAML::Node const& node, Json& echo)
{
    if (!node.IsDefined())
        throw ConfigError("config: key 'leaf': required block is missing");
    NodeReader r(node, "leaf", echo);
    HyperbolicParams p;
    double const big = 1e12;
    p.kappa = r.required_number("kappa", -1e3, 1e3);
    p.dt = r.number("dt", p.dt, 1e-9, 1.0);
    p.horizon = r.number("T", p.horizon, 1e-6, big);
    p.delta = r.number("delta", p.delta, 1e-7, big);
    p.cylinder_period = r.number("A", p.cylinder_period, 1e-9, big);
    r.finish();
    try
    {
        p.validate();
    }
    catch (std::invalid_argument const& e)
    {
        std::string msg = e.what();
        std::string key = msg.substr(0, msg.find(':'));
        throw ConfigError(location(node[key]) + "key 'leaf." + key + "'"
                          + msg.substr(msg.find(':')));
    }
    return p;
}

YAML::Node load_config_file(std::string const& filename)
{
    try
    {
        return YAML::LoadFile(filename);
    }
    catch (YAML::BadFile const&)
    {
        throw ConfigError("config: cannot open '" + filename + "'");
    }
    catch (YAML::ParserException const& e)
    {
        throw ConfigError("config:" + std::to_string(e.mark.line + 1) + ":"
                          + std::to_string(e.mark.column + 1) + ": parse error: " + e.msg);
    }
}

}  // namespace rcd
