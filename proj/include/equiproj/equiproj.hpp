#ifndef EQUIPROJ_EQUIPROJ_HPP
#define EQUIPROJ_EQUIPROJ_HPP

#include "equiproj/autodiff.hpp"
#include "equiproj/defect.hpp"
#include "equiproj/errors.hpp"
#include "equiproj/fft.hpp"
#include "equiproj/group.hpp"
#include "equiproj/io.hpp"
#include "equiproj/linalg.hpp"
#include "equiproj/random.hpp"
#include "equiproj/reynolds.hpp"
#include "equiproj/sampling.hpp"
#include "equiproj/spectral.hpp"
#include "equiproj/svg.hpp"
#include "equiproj/toy.hpp"

#endif  // EQUIPROJ_EQUIPROJ_HPP
