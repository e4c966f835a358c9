// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/suites.hpp"

int main(int argc, char** argv) { return shapebie::run_cli(argc, argv); }
