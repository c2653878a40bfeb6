#pragma once

#include <string>
#include <vector>

namespace hsr {

struct RgbImage;

// 16-bit RGB PNG, the interchange format for rendered images. Reading also
// accepts 8-bit and grayscale files and promotes them.
void png_write_rgb16(const RgbImage& img, const std::string& path);
RgbImage png_read_rgb(const std::string& path);

// 8-bit RGB, used for pseudo-color band visualizations.
void png_write_rgb8(const std::vector<unsigned char>& interleaved, int height, int width,
                    const std::string& path);

} // namespace hsr
