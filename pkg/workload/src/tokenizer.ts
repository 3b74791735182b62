/** Byte-level tokenization: one token per UTF-8 byte, plus an
 * end-of-sequence token used for padding. Dependency-free and lossless,
 * which is all a desk-scale language model needs. */

export const EOS_ID = 256;
export const VOCAB_SIZE = 257;

const encoder = new TextEncoder();
const decoder = new TextDecoder();

/** Text to token ids (UTF-8 bytes; every id is in [0, 256)). */
export function encode(text: string): number[] {
  return Array.from(encoder.encode(text));
}

/** Token ids back to text; EOS tokens terminate the sequence. */
export function decode(ids: number[]): string {
  const bytes: number[] = [];
  for (const id of ids) {
    if (id === EOS_ID) {
      break;
    }
    if (!Number.isInteger(id) || id < 0 || id >= EOS_ID) {
      throw new Error(`token id ${id} is outside the byte range`);
    }
    bytes.push(id);
  }
  return decoder.decode(new Uint8Array(bytes));
}
