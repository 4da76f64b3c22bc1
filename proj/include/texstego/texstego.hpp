#ifndef TEXSTEGO_TEXSTEGO_HPP
#define TEXSTEGO_TEXSTEGO_HPP

#include "config.hpp"
#include "error.hpp"
#include "image.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "morphable.hpp"
#include "png_io.hpp"
#include "stego.hpp"
#include "svd.hpp"
#include "texture_codec.hpp"
#include "wavelet.hpp"

#endif  // TEXSTEGO_TEXSTEGO_HPP
