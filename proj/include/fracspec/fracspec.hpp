#ifndef FRACSPEC_FRACSPEC_HPP
#define FRACSPEC_FRACSPEC_HPP

#include "cumulant.hpp"
#include "detection.hpp"
#include "fft.hpp"
#include "noise_study.hpp"
#include "signal_gen.hpp"
#include "spectra.hpp"
#include "types.hpp"

#endif // FRACSPEC_FRACSPEC_HPP
