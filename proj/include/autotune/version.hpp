#pragma once

#define AUTOTUNE_VERSION "0.1.0"
