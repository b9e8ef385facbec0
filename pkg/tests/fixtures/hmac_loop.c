/* a library context overwritten at the top of every round and dropped after */
struct HMAC_CTX {
  long h0;
  long h1;
};
struct HMAC_CTX* HMAC_CTX_new();
int HMAC_CTX_copy(struct HMAC_CTX* dst, struct HMAC_CTX* src);
void HMAC_CTX_free(struct HMAC_CTX* ctx);

long* hmac_fixture(long n) {
  long* out = alloc(long, 128);
  struct HMAC_CTX* base_hctx = HMAC_CTX_new();
  struct HMAC_CTX* hctx = HMAC_CTX_new();
  for (long i = 0; i < n; i++) {
    HMAC_CTX_copy(hctx, base_hctx);
    out[i] = hctx->h0 ^ hctx->h1 + i;
  }
  HMAC_CTX_free(hctx);
  HMAC_CTX_free(base_hctx);
  return out;
}
