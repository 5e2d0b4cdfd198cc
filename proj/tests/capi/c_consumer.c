#include <stdio.h>
#include <string.h>

#include "pasar/pasar.h"

int main(void) {
  pasar_table* table = NULL;
  pasar_stats stats;
  const double values[] = {0.0, 0.0, 3.0};
  if (pasar_table_from_values(values, 3, 8, &table) != PASAR_OK) return 1;
  if (pasar_table_stats(table, &stats) != PASAR_OK) return 2;
  pasar_table_free(table);
  if (stats.mean != 1.0 || stats.variance != 2.0) return 3;
  if (strcmp(pasar_version(), "0.1.0") != 0) return 4;
  printf("c consumer ok, skewness %.6f\n", stats.skewness);
  return 0;
}
