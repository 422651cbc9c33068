#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "topgn/intensity_map.hpp"

namespace topgn {

struct FrameParseError : std::runtime_error {
    FrameParseError(const std::string& path, int line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what)
    {
    }
};

/// Text frame stream: `FRAME <timestamp> <x> <y> <theta>` starts a frame,
/// followed by one `x y z intensity` line per point. `#` starts a comment.
inline std::vector<PointCloudFrame> read_frames(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open frames file: " + path);

    std::vector<PointCloudFrame> frames;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream ss(line);
        std::string head;
        ss >> head;
        if (head == "FRAME") {
            PointCloudFrame frame;
            double theta = 0.0;
            if (!(ss >> frame.timestamp >> frame.robot_pose.dx >> frame.robot_pose.dy >> theta))
                throw FrameParseError(path, line_no, "expected FRAME <t> <x> <y> <theta>");
            frame.robot_pose.angle = theta;
            frames.push_back(std::move(frame));
            continue;
        }
        if (frames.empty())
            throw FrameParseError(path, line_no, "point before the first FRAME header");
        LidarPoint p;
        std::istringstream ps(line);
        if (!(ps >> p.x >> p.y >> p.z >> p.intensity))
            throw FrameParseError(path, line_no, "expected x y z intensity");
        frames.back().points.push_back(p);
    }
    return frames;
}

inline void write_frames(const std::string& path, const std::vector<PointCloudFrame>& frames)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write frames file: " + path);
    char buf[160];
    for (const PointCloudFrame& frame : frames) {
        std::snprintf(buf, sizeof(buf), "FRAME %.9g %.9g %.9g %.9g\n", frame.timestamp,
                      frame.robot_pose.dx, frame.robot_pose.dy, frame.robot_pose.angle);
        out << buf;
        for (const LidarPoint& p : frame.points) {
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g\n", p.x, p.y, p.z, p.intensity);
            out << buf;
        }
    }
}

} // namespace topgn
