#pragma once

#include "access_sudoku/game.hpp"
#include "access_sudoku/generator.hpp"
#include "access_sudoku/grid.hpp"
#include "access_sudoku/random.hpp"
#include "access_sudoku/solver.hpp"
