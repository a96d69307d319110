#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "rcd/basin.hpp"
#include "rcd/hyperbolic.hpp"
#include "rcd/random_system.hpp"

namespace rcd {

using Json = nlohmann::ordered_json;

/// Invalid configuration; the message names the offending key and, when the
/// key exists in the file, its line and column.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Reads typed values from a YAML mapping, checking ranges, recording every
/// effective value (defaults included) into `echo`, and rejecting unknown
/// keys on finish().
class NodeReader
{
  public:
    NodeReader(YAML::Node node, std::string path, Json& echo);

    double number(std::string const& key, double def, double lo, double hi);
    double required_number(std::string const& key, double lo, double hi);
    std::size_t count(std::string const& key, std::size_t def, std::size_t lo, std::size_t hi);
    std::vector<double> numbers(std::string const& key, std::vector<double> def);
    /// The raw child node (undefined if absent); marks the key as consumed.
    YAML::Node child(std::string const& key);
    bool has(std::string const& key) const;

    void finish() const;

    [[noreturn]] void fail(std::string const& key, std::string const& msg) const;
    std::string key_path(std::string const& key) const;

  private:
    YAML::Node node_;
    std::string path_;
    Json& echo_;
    std::vector<std::string> used_;
};

/// "config:LINE:COL: " prefix for a node (empty if the node has no mark).
std::string location(YAML::Node const& node);

CircleMap parse_map(YAML::Node const& node, std::string const& path);
/// Parses {generators, weights[, attractors]}; attractors go to `attractors`.
GeneratorSystem parse_system(YAML::Node const& node, std::vector<Attractor>& attractors,
                             Json& echo);
HyperbolicParams parse_hyperbolic(YAML::Node const& node, Json& echo);

/// Loads a YAML or JSON file; parse errors become ConfigError with position.
YAML::Node load_config_file(std::string const& filename);

Json map_to_json(CircleMap const& g);

}  // namespace rcd
