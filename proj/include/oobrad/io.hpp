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

#ifndef OOBRAD_IO_HPP
#define OOBRAD_IO_HPP

#include "error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace oobrad
{
    inline std::ofstream open_output(const std::filesystem::path &path)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path.string() + "' for writing");
        return out;
    }

    // Comma-separated table with '#' comment lines; numbers in shortest round-trip form
    class CsvWriter
    {
    public:
        explicit CsvWriter(const std::filesystem::path &path) : path_(path), out_(open_output(path)) {}

        void comment(const std::string &text) { out_ << "# " << text << '\n'; }

        void header(const std::vector<std::string> &columns)
        {
            for (std::size_t i = 0; i < columns.size(); ++i)
                out_ << (i ? "," : "") << columns[i];
            out_ << '\n';
        }

        void row(const std::vector<double> &values)
        {
            for (std::size_t i = 0; i < values.size(); ++i)
                out_ << (i ? "," : "") << fmt::format("{}", values[i]);
            out_ << '\n';
        }

        ~CsvWriter() noexcept(false)
        {
            out_.flush();
            if (!out_ && std::uncaught_exceptions() == 0)
                throw IoError("write to '" + path_.string() + "' failed");
        }

    private:
        std::filesystem::path path_;
        std::ofstream out_;
    };

    // key = value lines
    inline void write_summary(const std::filesystem::path &path, const std::vector<std::pair<std::string, std::string>> &entries)
    {
        auto out = open_output(path);
        for (const auto &[k, v] : entries)
            out << k << " = " << v << '\n';
        if (!out)
            throw IoError("write to '" + path.string() + "' failed");
    }

    inline std::string num(double v) { return fmt::format("{}", v); }

    // Static line plot
    struct PlotSeries
    {
        std::string label;
        std::vector<double> x, y;
        std::string color = "#000000";
        bool dashed = false;
        bool points = false; // markers only
    };

    struct Plot
    {
        std::string title, xlabel, ylabel;
        std::vector<PlotSeries> series;
        std::vector<double> vlines; // dotted vertical markers
        double xmin = std::numeric_limits<double>::quiet_NaN(), xmax = xmin, ymin = xmin, ymax = xmin;
    };

    namespace detail
    {
        inline double nice_step(double span, int target)
        {
            const double raw = span / std::max(target, 1);
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            for (double f : {1.0, 2.0, 2.5, 5.0, 10.0})
                if (f * mag >= raw)
                    return f * mag;
            return 10.0 * mag;
        }

        inline std::string xml_escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                switch (c)
                {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '"': out += "&quot;"; break;
                default: out += c;
                }
            }
            return out;
        }
    }

    inline std::string render_svg(const Plot &p)
    {
        const double width = 720, height = 440, left = 70, right = 170, top = 40, bottom = 55;
        double x0 = p.xmin, x1 = p.xmax, y0 = p.ymin, y1 = p.ymax;
        auto fill = [&](double &lo, double &hi, bool use_x)
        {
            if (!std::isnan(lo) && !std::isnan(hi))
                return;
            double a = std::numeric_limits<double>::infinity(), b = -a;
            for (const auto &s : p.series)
                for (double v : use_x ? s.x : s.y)
                    if (std::isfinite(v))
                        a = std::min(a, v), b = std::max(b, v);
            if (!std::isfinite(a))
                a = 0.0, b = 1.0;
            if (b <= a)
                b = a + 1.0;
            if (std::isnan(lo))
                lo = a;
            if (std::isnan(hi))
                hi = b;
        };
        fill(x0, x1, true);
        fill(y0, y1, false);
        const double pw = width - left - right, ph = height - top - bottom;
        auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
        auto sy = [&](double y) { return top + (y1 - std::clamp(y, y0, y1)) / (y1 - y0) * ph; };

        std::string s = fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n", width, height);
        s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
        s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", left + pw / 2, detail::xml_escape(p.title));

        const double xs = detail::nice_step(x1 - x0, 8), ys = detail::nice_step(y1 - y0, 6);
        for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs)
        {
            s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#dddddd\"/>\n", sx(t), top, top + ph);
            s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", sx(t), top + ph + 16, std::abs(t) < 1e-12 * xs ? 0.0 : t);
        }
        for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys)
        {
            s += fmt::format("<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\" stroke=\"#dddddd\"/>\n", sy(t), left, left + pw);
            s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", left - 6, sy(t) + 4, std::abs(t) < 1e-12 * ys ? 0.0 : t);
        }
        for (double v : p.vlines)
            if (v >= x0 && v <= x1)
                s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#888888\" stroke-dasharray=\"2,3\"/>\n", sx(v), top, top + ph);
        s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top, pw, ph);

        for (std::size_t i = 0; i < p.series.size(); ++i)
        {
            const auto &ser = p.series[i];
            if (ser.points)
            {
                for (std::size_t j = 0; j < ser.x.size(); ++j)
                    if (std::isfinite(ser.y[j]) && ser.x[j] >= x0 && ser.x[j] <= x1)
                        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n", sx(ser.x[j]), sy(ser.y[j]), ser.color);
            }
            else
            {
                std::string pts;
                for (std::size_t j = 0; j < ser.x.size(); ++j)
                    if (std::isfinite(ser.y[j]) && ser.x[j] >= x0 && ser.x[j] <= x1)
                        pts += fmt::format("{:.2f},{:.2f} ", sx(ser.x[j]), sy(ser.y[j]));
                s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.4\"{} points=\"{}\"/>\n", ser.color,
                                 ser.dashed ? " stroke-dasharray=\"6,4\"" : "", pts);
            }
            const double ly = top + 14 + 18 * double(i);
            s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>\n", left + pw + 12, ly,
                             left + pw + 34, ser.color, ser.dashed ? " stroke-dasharray=\"6,4\"" : "");
            s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", left + pw + 40, ly + 4, detail::xml_escape(ser.label));
        }
        s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, height - 14, detail::xml_escape(p.xlabel));
        s += fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n", top + ph / 2, detail::xml_escape(p.ylabel));
        s += "</svg>\n";
        return s;
    }

    inline void write_svg(const std::filesystem::path &path, const Plot &p)
    {
        auto out = open_output(path);
        out << render_svg(p);
        if (!out)
            throw IoError("write to '" + path.string() + "' failed");
    }
}

#endif
