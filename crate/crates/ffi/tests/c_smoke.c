#include <stdio.h>
#include <string.h>

#include "pathrule.h"

int main(int argc, char **argv) {
    if (argc != 2) {
        return 2;
    }
    PathruleGraph *graph = NULL;
    if (pathrule_graph_load(argv[1], NULL, NULL, &graph) != PATHRULE_STATUS_OK) {
        char msg[256];
        pathrule_last_error(msg, sizeof msg);
        fprintf(stderr, "load: %s\n", msg);
        return 1;
    }
    PathruleMinerOptions opts = pathrule_miner_options_default();
    opts.max_len = 2;
    PathruleRuleBook *book = NULL;
    if (pathrule_mine(graph, &opts, &book) != PATHRULE_STATUS_OK) {
        return 1;
    }
    uint32_t subject = 0;
    pathrule_entity_id(graph, "p2", &subject);
    uint32_t ids[4];
    double scores[4];
    size_t written = 0;
    if (pathrule_predict(graph, book, subject, "grand", 0, PATHRULE_AGGREGATION_SUM, ids, scores, 4, &written) !=
        PATHRULE_STATUS_OK || written == 0) {
        return 1;
    }
    char name[64];
    pathrule_entity_name(graph, ids[0], name, sizeof name, NULL);
    printf("%s %.3f\n", name, scores[0]);
    pathrule_rulebook_free(book);
    pathrule_graph_free(graph);
    return 0;
}
