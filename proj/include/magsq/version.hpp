#pragma once

#define MAGSQ_VERSION "0.1.0"
