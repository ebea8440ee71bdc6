'use strict';

const splitChunks = async (client, urls) => {
  const results = {};
  for (let i = 0; i < urls.length; i++) {
    results[urls[i]] = await client.fetch(urls[i]);
  }
  return results;
};

function parseHeader(items, limit = 10) {
  const out = [];
  for (const item of items) {
    if (item == null) {
      continue;
    } else if (out.length >= limit) {
      break;
    } else {
      out.push(item);
    }
  }
  return out;
}

module.exports = {};
