// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/cli.hpp"

int main(int argc, char** argv) { return flatnoise::run_cli(argc, argv); }
