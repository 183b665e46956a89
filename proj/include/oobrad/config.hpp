// SPDX-License-Identifier: Apache-2.0
//
// oobrad - spatial out-of-band radiation analysis for multi-antenna transmitters
// Copyright (C) 2026 The oobrad authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef OOBRAD_CONFIG_HPP
#define OOBRAD_CONFIG_HPP

// Scenario files are INI text: "key = value" lines, optional [section] headers, comments
// starting with '#' or ';' (whole-line or trailing). Lists are comma separated; complex numbers are "re im" pairs.
// The full grammar with every key is documented in README.md.

#include "error.hpp"
#include "scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace oobrad
{
    namespace detail
    {
        inline std::string_view trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        inline std::vector<std::string_view> split(std::string_view s, char sep)
        {
            std::vector<std::string_view> out;
            if (trim(s).empty())
                return out;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = s.find(sep, start);
                out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        template <typename T>
        T parse_number(std::string_view text, const std::string &key)
        {
            text = trim(text);
            T v{};
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || ptr != text.data() + text.size())
                throw ConfigError("config: cannot parse '" + std::string(text) + "' for key '" + key + "'");
            return v;
        }

        inline bool parse_bool(std::string_view text, const std::string &key)
        {
            text = trim(text);
            if (text == "true" || text == "1" || text == "yes")
                return true;
            if (text == "false" || text == "0" || text == "no")
                return false;
            throw ConfigError("config: expected a boolean for key '" + key + "'");
        }

        inline std::vector<double> parse_list(std::string_view text, const std::string &key)
        {
            std::vector<double> out;
            for (auto item : split(text, ','))
                out.push_back(parse_number<double>(item, key));
            return out;
        }

        inline std::vector<cd> parse_complex_list(std::string_view text, const std::string &key)
        {
            std::vector<cd> out;
            for (auto item : split(text, ','))
            {
                std::vector<std::string_view> parts;
                std::size_t start = 0;
                while (start < item.size())
                {
                    const auto b = item.find_first_not_of(" \t", start);
                    if (b == std::string_view::npos)
                        break;
                    const auto e = item.find_first_of(" \t", b);
                    parts.push_back(item.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
                    start = e == std::string_view::npos ? item.size() : e;
                }
                if (parts.empty() || parts.size() > 2)
                    throw ConfigError("config: complex values are written as 're im' in key '" + key + "'");
                out.emplace_back(parse_number<double>(parts[0], key), parts.size() == 2 ? parse_number<double>(parts[1], key) : 0.0);
            }
            return out;
        }

        // Lists of lists separated by '|', e.g. "0.5, 0.5 | 0.9, 0.1"
        inline std::vector<std::vector<double>> parse_list_set(std::string_view text, const std::string &key)
        {
            std::vector<std::vector<double>> out;
            for (auto part : split(text, '|'))
                out.push_back(parse_list(part, key));
            return out;
        }

        inline ChannelKind parse_channel_kind(std::string_view text, const std::string &key)
        {
            text = trim(text);
            if (text == "rayleigh")
                return ChannelKind::rayleigh;
            if (text == "los")
                return ChannelKind::los;
            throw ConfigError("config: '" + key + "' must be 'rayleigh' or 'los'");
        }

        inline OperatingTarget parse_operating(std::string_view text, const std::string &key)
        {
            text = trim(text);
            if (text == "compression_1db")
                return OperatingTarget::compression_1db;
            if (text == "compression_1db_per_antenna")
                return OperatingTarget::compression_1db_per_antenna;
            if (text == "explicit_power")
                return OperatingTarget::explicit_power;
            if (text == "unscaled")
                return OperatingTarget::unscaled;
            throw ConfigError("config: unknown operating point '" + std::string(text) + "' in '" + key + "'");
        }

        inline void parse_symbol_kind(std::string_view text, McConfig &mc, const std::string &key)
        {
            text = trim(text);
            if (text == "gaussian")
            {
                mc.symbols = SymbolKind::gaussian;
                return;
            }
            if (text.starts_with("qam"))
            {
                mc.symbols = SymbolKind::qam;
                mc.qam_order = parse_number<int>(text.substr(3), key);
                return;
            }
            throw ConfigError("config: symbol kind must be 'gaussian' or 'qamN'");
        }
    }

    // Extra inputs that only some runners read
    struct SweepConfig
    {
        std::vector<std::vector<double>> allocations;
        std::vector<std::vector<double>> pathlosses;
    };

    struct Config
    {
        Scenario scenario;
        SweepConfig c1;
    };

    inline Config parse_config(std::istream &in)
    {
        namespace pt = boost::property_tree;
        pt::ptree tree;
        try
        {
            pt::read_ini(in, tree);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw ConfigError(std::string("config: ") + e.what());
        }

        Config cfg;
        Scenario &sc = cfg.scenario;
        McConfig &mc = sc.mc;
        using namespace detail;

        auto apply = [&](const std::string &key, std::string value)
        {
            value = value.substr(0, value.find_first_of("#;")); // trailing comment
            if (key == "name") sc.name = std::string(trim(value));
            else if (key == "seed") sc.seed = parse_number<std::uint64_t>(value, key);
            else if (key == "output_dir") sc.output_dir = std::string(trim(value));
            else if (key == "array.antennas") sc.antennas = parse_number<int>(value, key);
            else if (key == "array.users") sc.users = parse_number<int>(value, key);
            else if (key == "array.spacing_over_wavelength") sc.spacing_over_wavelength = parse_number<double>(value, key);
            else if (key == "channel.kind") sc.channel = parse_channel_kind(value, key);
            else if (key == "channel.taps") sc.rayleigh_taps = parse_number<int>(value, key);
            else if (key == "channel.user_angles_deg") sc.user_angles_deg = parse_list(value, key);
            else if (key == "channel.angle_range_deg") sc.angle_range_deg = parse_number<double>(value, key);
            else if (key == "channel.min_separation_deg") sc.min_separation_deg = parse_number<double>(value, key);
            else if (key == "channel.pathloss") sc.pathloss = parse_list(value, key);
            else if (key == "channel.victim_kind") sc.victim_channel = parse_channel_kind(value, key);
            else if (key == "channel.victim_pathloss") sc.victim_pathloss = parse_number<double>(value, key);
            else if (key == "pulse.rolloff") sc.rolloff = parse_number<double>(value, key);
            else if (key == "pulse.span") sc.span = parse_number<int>(value, key);
            else if (key == "pulse.oversampling") sc.oversampling = parse_number<int>(value, key);
            else if (key == "pulse.symbol_period") sc.symbol_period = parse_number<double>(value, key);
            else if (key == "pa.coefficients") sc.pa_coeffs = parse_complex_list(value, key);
            else if (key == "pa.operating_point") sc.operating = parse_operating(value, key);
            else if (key == "pa.input_power") sc.input_power = parse_number<double>(value, key);
            else if (key == "precoder.allocation") sc.allocation = parse_list(value, key);
            else if (key == "analysis.realizations") sc.realizations = parse_number<int>(value, key);
            else if (key == "analysis.victims") sc.victims = parse_number<int>(value, key);
            else if (key == "analysis.nfft") sc.nfft = parse_number<std::size_t>(value, key);
            else if (key == "analysis.pattern_step_deg") sc.pattern_step_deg = parse_number<double>(value, key);
            else if (key == "analysis.ccdf_freqs_over_b") sc.ccdf_freqs_over_b = parse_list(value, key);
            else if (key == "mc.symbols") mc.n_symbols = parse_number<std::size_t>(value, key);
            else if (key == "mc.welch_segment") mc.welch_segment = parse_number<std::size_t>(value, key);
            else if (key == "mc.welch_overlap") mc.welch_overlap = parse_number<double>(value, key);
            else if (key == "mc.symbol_kind") parse_symbol_kind(value, mc, key);
            else if (key == "mc.seed") mc.seed = parse_number<std::uint64_t>(value, key);
            else if (key == "c1.allocations") cfg.c1.allocations = parse_list_set(value, key);
            else if (key == "c1.pathlosses") cfg.c1.pathlosses = parse_list_set(value, key);
            else throw ConfigError("config: unknown key '" + key + "'");
        };

        for (const auto &[name, node] : tree)
        {
            if (node.empty())
                apply(name, node.data());
            else
                for (const auto &[key, leaf] : node)
                {
                    if (!leaf.empty())
                        throw ConfigError("config: sections cannot nest ('" + name + "." + key + "')");
                    apply(name + "." + key, leaf.data());
                }
        }
        sc.validate();
        return cfg;
    }

    inline Config parse_config_text(const std::string &text)
    {
        std::istringstream in(text);
        return parse_config(in);
    }

    inline Config load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("config: cannot open '" + path + "'");
        return parse_config(in);
    }
}

#endif
